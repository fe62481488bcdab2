#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "beamsched/tec.hpp"

namespace beamsched {

/// z-threshold: track iff tr(P)/L > z. The boundary is passive.
struct Threshold {
  double z = 0.0;

  static constexpr Threshold always() { return {-std::numeric_limits<double>::infinity()}; }
  static constexpr Threshold never() { return {std::numeric_limits<double>::infinity()}; }
};

int threshold_active(const TecState& p, Threshold z);

/// Discounted cost F and work G of a threshold policy, truncated after
/// `horizon` slots (tail valued 0).
struct ThresholdMetrics {
  double cost = 0.0;
  double work = 0.0;
  int horizon = 0;
};

struct IndexSettings {
  double discount = 0.9;
  int truncation = 100;
};

/// Unrolls the deterministic trajectory of the z-threshold policy from P. When
/// `first_action` is set that action is forced at t = 0 (the <a, z> policy).
ThresholdMetrics metrics(const TecState& p, Threshold z, const TargetSpec& target,
                         IndexSettings settings, std::optional<int> first_action = std::nullopt);

struct MarginalMetrics {
  double cost = 0.0;  // f = F<0,z> - F<1,z>
  double work = 0.0;  // g = G<1,z> - G<0,z>
  bool work_positive() const { return work > 0.0; }
  /// f/g; empty when g <= 0.
  std::optional<double> ratio() const {
    if (!work_positive()) return std::nullopt;
    return cost / work;
  }
};

MarginalMetrics marginal_metrics(const TecState& p, Threshold z, const TargetSpec& target,
                                 IndexSettings settings);

enum class IndexKind { mp, tec, myopic };

std::string_view to_string(IndexKind kind);

struct IndexValue {
  double value = 0.0;
  IndexKind kind = IndexKind::mp;
};

/// Marginal productivity index mp(P, tr(P)/L). Throws IndexAnomaly when the
/// marginal work at the self-threshold is not positive.
IndexValue mp_index(const TecState& p, const TargetSpec& target, IndexSettings settings);

/// d tr(P)/L.
IndexValue tec_index(const TecState& p, const TargetSpec& target);

/// d [tr(phi0(P)) - tr(phi1(P))]/L.
IndexValue myopic_index(const TecState& p, const TargetSpec& target);

/// One tabulated grid point. For L > 1 the state is the isotropic matrix x I.
struct IndexRow {
  double level = 0.0;
  double marginal_work = 0.0;
  std::optional<double> mp;
  double tec = 0.0;
  double myopic = 0.0;
};

/// Evaluates all three indices on a strictly increasing grid without
/// throwing on anomalies; rows with g <= 0 carry an empty mp.
std::vector<IndexRow> tabulate_indices(const TargetSpec& target, IndexSettings settings,
                                       std::span<const double> grid);

/// Precomputed MP index over a scalar grid with piecewise-linear lookup.
/// Immutable once built; lookups outside the grid clamp to the end values.
class IndexTable {
 public:
  IndexTable() = default;
  IndexTable(std::vector<double> grid, std::vector<double> values);

  double operator()(double level) const;
  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  bool empty() const { return grid_.empty(); }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

/// Throws IndexAnomaly at the first grid point with g <= 0 and
/// std::invalid_argument for a grid that is not strictly increasing.
IndexTable index_table(const TargetSpec& target, IndexSettings settings, std::span<const double> grid);

/// lo, lo + step, ... up to hi (inclusive within step/1e6); a single point
/// when step exceeds the range.
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace beamsched
