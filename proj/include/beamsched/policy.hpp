#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "beamsched/index.hpp"
#include "beamsched/rng.hpp"
#include "beamsched/scenario.hpp"

namespace beamsched {

/// a[n] = 1 when target n is tracked this slot.
using ActionVector = std::vector<std::uint8_t>;

enum class PolicyKind { whittle_mp, myopic, tec_trace };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

/// What the MP policy does at a state whose marginal work at the
/// self-threshold is not positive.
enum class AnomalyRule {
  fail,       // propagate IndexAnomaly
  raw_ratio,  // use f/g as is for g < 0 and count it; g == 0 still fails
};

std::string_view to_string(AnomalyRule rule);
std::optional<AnomalyRule> parse_anomaly_rule(std::string_view name);

struct PolicyOptions {
  PolicyKind kind = PolicyKind::whittle_mp;
  // Only targets with nonnegative index are eligible.
  bool nonneg_filter = true;
  AnomalyRule on_anomaly = AnomalyRule::fail;
};

/// Activates the K largest indices. Exact ties at the cut are broken
/// uniformly at random; rng is only consulted when such a tie exists.
ActionVector select(std::span<const double> indices, int radars, bool nonneg_filter, Rng& rng);

/// Per-target precomputed MP tables (scalar targets only); empty entries fall
/// back to direct computation.
using IndexTables = std::vector<IndexTable>;

/// Index of one target under `kind`. Under AnomalyRule::raw_ratio each
/// replaced anomaly increments `anomalies` when given.
double policy_index(const TecState& p, const TargetSpec& target, PolicyKind kind,
                    IndexSettings settings, const IndexTable* table = nullptr,
                    AnomalyRule rule = AnomalyRule::fail, long* anomalies = nullptr);

ActionVector decide(std::span<const TecState> states, const ScenarioSpec& scenario,
                    const PolicyOptions& options, Rng& rng, const IndexTables* tables = nullptr,
                    long* anomalies = nullptr);

}  // namespace beamsched
