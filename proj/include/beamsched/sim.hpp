#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamsched/bound.hpp"
#include "beamsched/policy.hpp"
#include "beamsched/tec.hpp"

namespace beamsched {

inline constexpr double kGramMinEigenvalue = 1e-9;

/// Draws P0 from the target's rule. Gram draws below the eigenvalue floor are
/// redrawn; `redraws` (if given) is incremented per rejection.
TecState sample_initial(const TargetSpec& target, Rng& rng, int* redraws = nullptr);

/// Initial states of one replication: target n draws from its own stream
/// derived from (seed, n), so every policy sees the same states.
std::vector<TecState> initial_states(const ScenarioSpec& scenario, std::uint64_t seed);

std::uint64_t replication_seed(std::uint64_t master_seed, int replication);

struct EpisodeResult {
  double discounted_cost = 0.0;
  double discounted_work = 0.0;  // sum_t beta^t sum_n a_{n,t}
  double max_slot_cost = 0.0;
  long index_anomalies = 0;  // states priced by the raw f/g ratio
  std::vector<ActionVector> actions;  // one per slot
  std::vector<TecState> initial_states;
  std::vector<TecState> final_states;
  std::uint64_t seed = 0;

  /// Bound on the discounted cost beyond the horizon, from the largest
  /// observed per-slot cost.
  double tail_bound(double discount) const;
};

/// Runs the index policy for `horizon` slots from the seed's initial states.
EpisodeResult run_episode(const ScenarioSpec& scenario, const PolicyOptions& policy, int horizon,
                          std::uint64_t seed, const IndexTables* tables = nullptr);

/// Same loop from explicit initial states; `tie_rng` breaks exact index ties.
EpisodeResult run_episode_from(const ScenarioSpec& scenario, const PolicyOptions& policy, int horizon,
                               std::span<const TecState> initial, Rng& tie_rng,
                               const IndexTables* tables = nullptr);

/// Cost of a fixed open-loop action schedule (actions[t][n]).
double schedule_cost(const ScenarioSpec& scenario, std::span<const TecState> initial,
                     std::span<const ActionVector> actions);

struct PolicySummary {
  PolicyOptions policy;
  double mean_cost = 0.0;
  double standard_error = 0.0;
  double mean_tail_bound = 0.0;
  double runtime_ms = 0.0;
  long index_anomalies = 0;   // summed over replications
  std::vector<double> costs;  // per replication, in replication order
  std::optional<double> gap_percent;
};

struct ExperimentResult {
  std::string scenario_id;
  int targets = 0;
  int radars = 0;
  int replications = 0;
  std::uint64_t master_seed = 0;
  int horizon = 0;
  std::vector<PolicySummary> policies;
  std::optional<double> dual_bound;  // mean V^D over replications, when computed
  double runtime_ms = 0.0;

  const PolicySummary* find(PolicyKind kind) const;
};

struct MonteCarloOptions {
  int replications = 100;
  std::uint64_t master_seed = 1;
  int horizon = -1;  // < 0: scenario.horizon
  int threads = 1;
  const IndexTables* tables = nullptr;
};

/// Paired replications: replication r draws initial states from
/// replication_seed(master, r) and every policy runs from them.
ExperimentResult monte_carlo(const ScenarioSpec& scenario, std::span<const PolicyOptions> policies,
                             const MonteCarloOptions& options);

/// 100 (mean_cost - V_D) / V_D. Throws std::domain_error for V_D <= 0.
double suboptimality_gap(double mean_cost, double dual_bound);

/// Fills gap_percent for every policy from `dual_bound`.
void attach_gaps(ExperimentResult& result, double dual_bound);

struct DualEstimate {
  double mean_bound = 0.0;
  std::vector<DualResult> per_replication;  // replication order
};

/// V^D for the initial states of every replication, averaged. With fixed
/// initial states the bound is computed once and shared.
DualEstimate replicated_dual_bound(const ScenarioSpec& scenario, std::uint64_t master_seed, int replications,
                                   int threads, const DualOptions& options = {});

/// Header: scenario_id,policy,K,N,N_mc,mean_cost,stderr,gap_percent,seed,runtime_ms,tail_bound,index_anomalies
void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results, bool header = true);

}  // namespace beamsched
