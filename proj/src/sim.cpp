#include "beamsched/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "beamsched/csv.hpp"
#include "beamsched/parallel.hpp"

namespace beamsched {

TecState sample_initial(const TargetSpec& target, Rng& rng, int* redraws) {
  return std::visit(
      [&](const auto& rule) -> TecState {
        using R0 = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R0, FixedInitial>) {
          return TecState(rule.P);
        } else if constexpr (std::is_same_v<R0, UniformScalarInitial>) {
          return TecState::scalar(rng.uniform_open(rule.lo, rule.hi));
        } else {
          const int L = rule.dim;
          for (;;) {
            Matrix r0(L, L);
            for (int i = 0; i < L; ++i)
              for (int j = 0; j < L; ++j) r0(i, j) = rng.uniform01();
            Matrix p = r0.transpose() * r0;
            p = (p + p.transpose()) * 0.5;
            Eigen::SelfAdjointEigenSolver<Matrix> es(p, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() >= kGramMinEigenvalue) return TecState(std::move(p));
            if (redraws) ++*redraws;
          }
        }
      },
      target.initial);
}

std::vector<TecState> initial_states(const ScenarioSpec& scenario, std::uint64_t seed) {
  std::vector<TecState> out;
  out.reserve(scenario.targets.size());
  for (std::size_t n = 0; n < scenario.targets.size(); ++n) {
    Rng rng(derive_seed(seed, {n}));
    out.push_back(sample_initial(scenario.targets[n], rng));
  }
  return out;
}

std::uint64_t replication_seed(std::uint64_t master_seed, int replication) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(replication)});
}

double EpisodeResult::tail_bound(double discount) const {
  const auto horizon = static_cast<double>(actions.size());
  return max_slot_cost * std::pow(discount, horizon) / (1.0 - discount);
}

namespace {

TecState advance(const TecState& p, int action, const TargetSpec& target, std::size_t n, int slot) {
  try {
    TecState next = phi(p, action, target);
    ensure_positive_definite(next);
    return next;
  } catch (const NumericalError& e) {
    throw NumericalError("target " + std::to_string(n) + ", slot " + std::to_string(slot) + ": " + e.what());
  }
}

}  // namespace

EpisodeResult run_episode_from(const ScenarioSpec& scenario, const PolicyOptions& policy, int horizon,
                               std::span<const TecState> initial, Rng& tie_rng, const IndexTables* tables) {
  const auto N = scenario.targets.size();
  if (initial.size() != N) throw std::invalid_argument("run_episode: initial state count != target count");
  EpisodeResult res;
  res.initial_states.assign(initial.begin(), initial.end());
  std::vector<TecState> states = res.initial_states;
  res.actions.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  double disc = 1.0;
  for (int t = 0; t < horizon; ++t) {
    ActionVector a = decide(states, scenario, policy, tie_rng, tables, &res.index_anomalies);
    double slot_cost = 0.0;
    int active = 0;
    for (std::size_t n = 0; n < N; ++n) {
      slot_cost += cost(states[n], a[n], scenario.targets[n]);
      active += a[n];
    }
    res.discounted_cost += disc * slot_cost;
    res.discounted_work += disc * active;
    res.max_slot_cost = std::max(res.max_slot_cost, slot_cost);
    for (std::size_t n = 0; n < N; ++n) states[n] = advance(states[n], a[n], scenario.targets[n], n, t);
    res.actions.push_back(std::move(a));
    disc *= scenario.discount;
  }
  res.final_states = std::move(states);
  return res;
}

EpisodeResult run_episode(const ScenarioSpec& scenario, const PolicyOptions& policy, int horizon,
                          std::uint64_t seed, const IndexTables* tables) {
  const auto initial = initial_states(scenario, seed);
  Rng tie_rng(derive_seed(seed, {kTieBreakStream}));
  EpisodeResult res = run_episode_from(scenario, policy, horizon, initial, tie_rng, tables);
  res.seed = seed;
  return res;
}

double schedule_cost(const ScenarioSpec& scenario, std::span<const TecState> initial,
                     std::span<const ActionVector> actions) {
  std::vector<TecState> states(initial.begin(), initial.end());
  double total = 0.0;
  double disc = 1.0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    for (std::size_t n = 0; n < states.size(); ++n) {
      total += disc * cost(states[n], actions[t][n], scenario.targets[n]);
      states[n] = phi(states[n], actions[t][n], scenario.targets[n]);
    }
    disc *= scenario.discount;
  }
  return total;
}

const PolicySummary* ExperimentResult::find(PolicyKind kind) const {
  for (const auto& p : policies)
    if (p.policy.kind == kind) return &p;
  return nullptr;
}

ExperimentResult monte_carlo(const ScenarioSpec& scenario, std::span<const PolicyOptions> policies,
                             const MonteCarloOptions& options) {
  if (options.replications < 1) throw std::invalid_argument("monte_carlo: N_mc must be >= 1");
  const auto started = std::chrono::steady_clock::now();
  const int horizon = options.horizon < 0 ? scenario.horizon : options.horizon;
  const auto reps = static_cast<std::size_t>(options.replications);
  const auto P = policies.size();

  // [replication][policy]
  std::vector<std::vector<double>> costs(reps, std::vector<double>(P));
  std::vector<std::vector<double>> tails(reps, std::vector<double>(P));
  std::vector<std::vector<double>> elapsed(reps, std::vector<double>(P));
  std::vector<std::vector<long>> anomalies(reps, std::vector<long>(P));

  parallel_for(reps, options.threads, [&](std::size_t r) {
    const auto seed = replication_seed(options.master_seed, static_cast<int>(r));
    for (std::size_t p = 0; p < P; ++p) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto ep = run_episode(scenario, policies[p], horizon, seed, options.tables);
      const auto t1 = std::chrono::steady_clock::now();
      costs[r][p] = ep.discounted_cost;
      tails[r][p] = ep.tail_bound(scenario.discount);
      elapsed[r][p] = std::chrono::duration<double, std::milli>(t1 - t0).count();
      anomalies[r][p] = ep.index_anomalies;
    }
  });

  ExperimentResult out;
  out.scenario_id = scenario.id;
  out.targets = scenario.target_count();
  out.radars = scenario.radars;
  out.replications = options.replications;
  out.master_seed = options.master_seed;
  out.horizon = horizon;
  for (std::size_t p = 0; p < P; ++p) {
    PolicySummary s;
    s.policy = policies[p];
    double sum = 0.0;
    double tail = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      s.costs.push_back(costs[r][p]);
      sum += costs[r][p];
      tail += tails[r][p];
      s.runtime_ms += elapsed[r][p];
      s.index_anomalies += anomalies[r][p];
    }
    s.mean_cost = sum / static_cast<double>(reps);
    s.mean_tail_bound = tail / static_cast<double>(reps);
    if (reps > 1) {
      double ss = 0.0;
      for (double c : s.costs) ss += (c - s.mean_cost) * (c - s.mean_cost);
      s.standard_error = std::sqrt(ss / static_cast<double>(reps - 1)) / std::sqrt(static_cast<double>(reps));
    }
    out.policies.push_back(std::move(s));
  }
  out.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return out;
}

double suboptimality_gap(double mean_cost, double dual_bound) {
  if (!(dual_bound > 0.0)) throw std::domain_error("suboptimality gap needs a positive lower bound");
  return 100.0 * (mean_cost - dual_bound) / dual_bound;
}

void attach_gaps(ExperimentResult& result, double dual_bound) {
  result.dual_bound = dual_bound;
  for (auto& p : result.policies) p.gap_percent = suboptimality_gap(p.mean_cost, dual_bound);
}

DualEstimate replicated_dual_bound(const ScenarioSpec& scenario, std::uint64_t master_seed, int replications,
                                   int threads, const DualOptions& options) {
  if (replications < 1) throw std::invalid_argument("replicated_dual_bound: N_mc must be >= 1");
  const bool fixed = std::all_of(scenario.targets.begin(), scenario.targets.end(), [](const TargetSpec& t) {
    return std::holds_alternative<FixedInitial>(t.initial);
  });
  auto bound_for = [&](int r) {
    const auto states = initial_states(scenario, replication_seed(master_seed, r));
    std::vector<double> levels;
    for (const auto& s : states) levels.push_back(s.level());
    return dual_search(scenario, levels, options);
  };
  DualEstimate out;
  out.per_replication.resize(static_cast<std::size_t>(replications));
  if (fixed) {
    const DualResult once = bound_for(0);
    std::fill(out.per_replication.begin(), out.per_replication.end(), once);
  } else {
    parallel_for(out.per_replication.size(), threads,
                 [&](std::size_t r) { out.per_replication[r] = bound_for(static_cast<int>(r)); });
  }
  double sum = 0.0;
  for (const auto& d : out.per_replication) sum += d.bound;
  out.mean_bound = sum / static_cast<double>(replications);
  return out;
}

void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results, bool header) {
  CsvWriter w(out);
  if (header)
    w.header({"scenario_id", "policy", "K", "N", "N_mc", "mean_cost", "stderr", "gap_percent", "seed",
              "runtime_ms", "tail_bound", "index_anomalies"});
  for (const auto& r : results) {
    for (const auto& p : r.policies) {
      w.field(r.scenario_id)
          .field(to_string(p.policy.kind))
          .field(r.radars)
          .field(r.targets)
          .field(r.replications)
          .field(p.mean_cost)
          .field(p.standard_error)
          .field(p.gap_percent)
          .field(std::string_view(std::to_string(r.master_seed)))
          .field(p.runtime_ms)
          .field(p.mean_tail_bound)
          .field(p.index_anomalies);
      w.end_row();
    }
  }
}

}  // namespace beamsched
