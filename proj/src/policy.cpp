#include "beamsched/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace beamsched {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::whittle_mp: return "whittle_mp";
    case PolicyKind::myopic: return "myopic";
    case PolicyKind::tec_trace: return "tec_trace";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "whittle_mp" || name == "whittle" || name == "mp") return PolicyKind::whittle_mp;
  if (name == "myopic") return PolicyKind::myopic;
  if (name == "tec_trace" || name == "tec" || name == "tev") return PolicyKind::tec_trace;
  return std::nullopt;
}

std::string_view to_string(AnomalyRule rule) { return rule == AnomalyRule::fail ? "fail" : "ratio"; }

std::optional<AnomalyRule> parse_anomaly_rule(std::string_view name) {
  if (name == "fail") return AnomalyRule::fail;
  if (name == "ratio" || name == "raw_ratio") return AnomalyRule::raw_ratio;
  return std::nullopt;
}

ActionVector select(std::span<const double> indices, int radars, bool nonneg_filter, Rng& rng) {
  if (radars < 1) throw std::invalid_argument("select: K must be >= 1");
  const std::size_t n = indices.size();
  ActionVector action(n, 0);

  std::vector<std::size_t> eligible;
  eligible.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(indices[i])) throw std::invalid_argument("select: non-finite index");
    if (!nonneg_filter || indices[i] >= 0.0) eligible.push_back(i);
  }
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(radars), eligible.size());
  if (k == 0) return action;

  // Stable descending order keeps equal values in target order.
  std::stable_sort(eligible.begin(), eligible.end(),
                   [&](std::size_t a, std::size_t b) { return indices[a] > indices[b]; });
  const double cut = indices[eligible[k - 1]];

  std::size_t taken = 0;
  std::vector<std::size_t> tied;
  for (auto i : eligible) {
    if (indices[i] > cut) {
      action[i] = 1;
      ++taken;
    } else if (indices[i] == cut) {
      tied.push_back(i);
    }
  }
  std::size_t need = k - taken;
  if (need == tied.size()) {
    for (auto i : tied) action[i] = 1;
    return action;
  }
  // Partial Fisher-Yates over the tie set.
  for (std::size_t j = 0; j < need; ++j) {
    const auto pick = j + static_cast<std::size_t>(rng.below(tied.size() - j));
    std::swap(tied[j], tied[pick]);
    action[tied[j]] = 1;
  }
  return action;
}

double policy_index(const TecState& p, const TargetSpec& target, PolicyKind kind,
                    IndexSettings settings, const IndexTable* table, AnomalyRule rule, long* anomalies) {
  switch (kind) {
    case PolicyKind::whittle_mp: {
      if (table && !table->empty() && p.dim() == 1) return (*table)(p.value());
      if (rule == AnomalyRule::fail) return mp_index(p, target, settings).value;
      const auto m = marginal_metrics(p, {p.level()}, target, settings);
      if (m.work > 0.0) return m.cost / m.work;
      if (m.work == 0.0) throw IndexAnomaly(p.level(), p.level(), m.work);
      if (anomalies) ++*anomalies;
      return m.cost / m.work;
    }
    case PolicyKind::myopic: return myopic_index(p, target).value;
    case PolicyKind::tec_trace: return tec_index(p, target).value;
  }
  return 0.0;
}

ActionVector decide(std::span<const TecState> states, const ScenarioSpec& scenario,
                    const PolicyOptions& options, Rng& rng, const IndexTables* tables, long* anomalies) {
  const auto n = states.size();
  if (n != scenario.targets.size()) throw std::invalid_argument("decide: state count != target count");
  const IndexSettings settings{scenario.discount, scenario.truncation};
  std::vector<double> indices(n);
  for (std::size_t i = 0; i < n; ++i) {
    const IndexTable* table = (tables && i < tables->size()) ? &(*tables)[i] : nullptr;
    indices[i] = policy_index(states[i], scenario.targets[i], options.kind, settings, table, options.on_anomaly,
                              anomalies);
  }
  return select(indices, scenario.radars, options.nonneg_filter, rng);
}

}  // namespace beamsched
