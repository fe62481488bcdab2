#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "beamsched/scenario.hpp"
#include "beamsched/tec.hpp"

namespace beamsched {

/// lo, lo + step, ..., lo + (points - 1) step.
struct UniformGrid {
  double lo = 0.01;
  double step = 0.01;
  int points = 5000;

  static UniformGrid between(double lo, double hi, double step);
  double at(int i) const { return lo + step * static_cast<double>(i); }
  double hi() const { return at(points - 1); }
};

/// Single-target value function of the subsidy problem
///   v(P) = min_a { C(P, a) + lambda a + beta v(phi_a(P)) }
/// sampled on a TEV grid.
struct ValueGrid {
  UniformGrid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> actions;  // minimizing action per grid point, passive on ties
  double subsidy = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residuals;  // sup-norm change per sweep
  long extrapolations = 0;        // (point, action) images above the grid

  /// Piecewise-linear interpolation, extended linearly beyond both ends.
  double operator()(double level) const;
};

struct ValueIterationOptions {
  // Stop once the sup-norm change guarantees |v - v*| <= tolerance.
  double tolerance = 1e-6;
  int max_iterations = 10000;
  const ValueGrid* warm_start = nullptr;
};

/// Throws ConvergenceError on non-convergence and NumericalError when an
/// image of the grid falls below its first point. Scalar targets only.
ValueGrid value_iterate(const TargetSpec& target, double subsidy, double discount, const UniformGrid& grid,
                        const ValueIterationOptions& options = {});

/// Greedy action of the subsidy problem at an arbitrary level, from the
/// one-step lookahead on `values`.
int subsidy_action(const TargetSpec& target, const ValueGrid& values, double level, double discount);

/// Discounted activations of the greedy policy from `level`, summed until
/// the discount weight drops below 1e-12.
double subsidy_policy_work(const TargetSpec& target, const ValueGrid& values, double level, double discount);

/// sum_n v_n(P_n0) - K lambda / (1 - beta); values[n] belongs to target n.
double lagrangian_value(const ScenarioSpec& scenario, double subsidy, std::span<const ValueGrid* const> values,
                        std::span<const double> initial_levels);

struct DualProbe {
  double subsidy = 0.0;
  double value = 0.0;
};

struct DualResult {
  double best_subsidy = 0.0;
  double bound = 0.0;        // V^D
  double subsidy_max = 0.0;  // upper end of the searched interval
  std::vector<DualProbe> trace;  // in evaluation order
  long extrapolations = 0;
};

struct DualOptions {
  std::optional<double> subsidy_max;  // checked; found by doubling when empty
  std::optional<double> search_tol;   // default 1e-3 * subsidy_max
  UniformGrid grid = UniformGrid::between(0.01, 50.0, 0.01);
  ValueIterationOptions value_iteration;
};

/// Maximizes the concave dual lambda -> L(lambda) by golden-section search on
/// [0, subsidy_max]. Throws DualSetupError when the supplied subsidy_max does
/// not bracket the maximizer (total discounted work there still exceeds
/// K / (1 - beta)). Scalar scenarios only.
DualResult dual_search(const ScenarioSpec& scenario, std::span<const double> initial_levels,
                       const DualOptions& options = {});

/// Exact finite-horizon subsidy value by recursion over all 2^horizon action
/// paths; any state dimension.
double finite_horizon_value(const TargetSpec& target, double subsidy, double discount, const TecState& initial,
                            int horizon);

/// Dual of the horizon-truncated problem, exact up to the lambda search width.
DualResult finite_horizon_dual(const ScenarioSpec& scenario, std::span<const TecState> initial, int horizon,
                               double search_tol = 1e-6);

/// Rows {lambda, L_value} in evaluation order, then {lambda_star, V_D}.
void write_dual_trace_csv(std::ostream& out, const DualResult& result);

/// Generic golden-section maximization of a unimodal function on [lo, hi];
/// every evaluation is appended to `trace`.
template <class Fn>
double golden_section_maximize(Fn&& f, double lo, double hi, double width, std::vector<DualProbe>& trace);

}  // namespace beamsched

#include "beamsched/detail/golden.hpp"
