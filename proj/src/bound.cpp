#include "beamsched/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "beamsched/csv.hpp"
#include "beamsched/log.hpp"

namespace beamsched {

UniformGrid UniformGrid::between(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw ConfigError("grid needs lo < hi and step > 0");
  UniformGrid g;
  g.lo = lo;
  g.step = step;
  g.points = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (g.points < 2) throw ConfigError("grid needs at least two points");
  return g;
}

namespace {

// Linear interpolation on a uniform grid, extended linearly beyond both ends.
struct Stencil {
  int index = 0;
  double weight = 0.0;
};

Stencil stencil(const UniformGrid& g, double x) {
  const double s = (x - g.lo) / g.step;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, g.points - 2);
  return {i, s - static_cast<double>(i)};
}

double interpolate(const std::vector<double>& v, Stencil st) {
  const auto i = static_cast<std::size_t>(st.index);
  return v[i] + st.weight * (v[i + 1] - v[i]);
}

double step_image(const TargetSpec& target, double level, int action) {
  return phi(TecState::scalar(level), action, target).value();
}

void require_scalar(const TargetSpec& target) {
  if (!target.is_scalar()) throw ConfigError("the grid bound supports scalar targets only");
}

}  // namespace

double ValueGrid::operator()(double level) const { return interpolate(values, stencil(grid, level)); }

ValueGrid value_iterate(const TargetSpec& target, double subsidy, double discount, const UniformGrid& grid,
                        const ValueIterationOptions& options) {
  require_scalar(target);
  const auto n = static_cast<std::size_t>(grid.points);
  ValueGrid out;
  out.grid = grid;
  out.subsidy = subsidy;

  std::vector<Stencil> s0(n), s1(n);
  std::vector<double> c0(n), c1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = grid.at(static_cast<int>(i));
    const double i0 = step_image(target, p, 0);
    const double i1 = step_image(target, p, 1);
    for (double img : {i0, i1}) {
      if (img < grid.lo - 1e-12)
        throw NumericalError("TEV image " + format_double(img) + " lies below the grid start " +
                             format_double(grid.lo));
      if (img > grid.hi()) ++out.extrapolations;
    }
    s0[i] = stencil(grid, i0);
    s1[i] = stencil(grid, i1);
    const TecState ps = TecState::scalar(p);
    c0[i] = cost(ps, 0, target);
    c1[i] = cost(ps, 1, target) + subsidy;
  }

  std::vector<double> v(n, 0.0);
  if (options.warm_start) {
    const ValueGrid& w = *options.warm_start;
    for (std::size_t i = 0; i < n; ++i) v[i] = w(grid.at(static_cast<int>(i)));
  }
  std::vector<double> next(n);
  out.actions.assign(n, 0);
  const double stop = discount > 0.0 ? options.tolerance * (1.0 - discount) / discount
                                     : std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q0 = c0[i] + discount * interpolate(v, s0[i]);
      const double q1 = c1[i] + discount * interpolate(v, s1[i]);
      const bool active = q1 < q0;
      next[i] = active ? q1 : q0;
      out.actions[i] = active ? 1 : 0;
      change = std::max(change, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    out.iterations = it;
    out.residual = change;
    out.residuals.push_back(change);
    if (!std::isfinite(change))
      throw ConvergenceError("value iteration diverged at lambda = " + format_double(subsidy));
    if (change <= stop) {
      out.values = std::move(v);
      return out;
    }
  }
  throw ConvergenceError("value iteration did not converge in " + std::to_string(options.max_iterations) +
                         " sweeps at lambda = " + format_double(subsidy) + " (residual " +
                         format_double(out.residual) + ")");
}

int subsidy_action(const TargetSpec& target, const ValueGrid& values, double level, double discount) {
  const TecState p = TecState::scalar(level);
  const double q0 = cost(p, 0, target) + discount * values(step_image(target, level, 0));
  const double q1 = cost(p, 1, target) + values.subsidy + discount * values(step_image(target, level, 1));
  return q1 < q0 ? 1 : 0;
}

double subsidy_policy_work(const TargetSpec& target, const ValueGrid& values, double level, double discount) {
  double work = 0.0;
  double disc = 1.0;
  while (disc >= 1e-12) {
    const int a = subsidy_action(target, values, level, discount);
    work += disc * a;
    level = step_image(target, level, a);
    disc *= discount;
  }
  return work;
}

double lagrangian_value(const ScenarioSpec& scenario, double subsidy, std::span<const ValueGrid* const> values,
                        std::span<const double> initial_levels) {
  if (values.size() != scenario.targets.size() || initial_levels.size() != scenario.targets.size())
    throw std::invalid_argument("lagrangian_value: one value grid and one initial level per target");
  double total = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) total += (*values[n])(initial_levels[n]);
  return total - scenario.radars * subsidy / (1.0 - scenario.discount);
}

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool same_dynamics(const TargetSpec& a, const TargetSpec& b) {
  if (a.modes.size() != b.modes.size()) return false;
  for (std::size_t m = 0; m < a.modes.size(); ++m)
    if (!same_matrix(a.modes[m].transition, b.modes[m].transition) ||
        !same_matrix(a.modes[m].noise, b.modes[m].noise))
      return false;
  return a.probs.passive == b.probs.passive && a.probs.active == b.probs.active &&
         same_matrix(a.meas.H, b.meas.H) && same_matrix(a.meas.R, b.meas.R) && a.weight == b.weight &&
         a.measurement_cost == b.measurement_cost;
}

// Value grids per subsidy, shared by targets with identical dynamics.
class DualEvaluator {
 public:
  DualEvaluator(const ScenarioSpec& scenario, std::span<const double> levels, const DualOptions& options)
      : scenario_(scenario), levels_(levels.begin(), levels.end()), options_(options) {
    for (std::size_t n = 0; n < scenario.targets.size(); ++n) {
      require_scalar(scenario.targets[n]);
      std::size_t g = 0;
      while (g < representatives_.size() && !same_dynamics(scenario.targets[representatives_[g]], scenario.targets[n]))
        ++g;
      if (g == representatives_.size()) representatives_.push_back(n);
      group_of_.push_back(g);
    }
  }

  const std::vector<ValueGrid>& grids(double subsidy) {
    auto it = cache_.find(subsidy);
    if (it != cache_.end()) return it->second;
    const std::vector<ValueGrid>* warm = nearest(subsidy);
    std::vector<ValueGrid> grids;
    for (std::size_t g = 0; g < representatives_.size(); ++g) {
      ValueIterationOptions vi = options_.value_iteration;
      if (warm) vi.warm_start = &(*warm)[g];
      grids.push_back(value_iterate(scenario_.targets[representatives_[g]], subsidy, scenario_.discount,
                                    options_.grid, vi));
    }
    return cache_.emplace(subsidy, std::move(grids)).first->second;
  }

  double value(double subsidy) {
    const auto& g = grids(subsidy);
    std::vector<const ValueGrid*> per_target;
    for (std::size_t n = 0; n < group_of_.size(); ++n) per_target.push_back(&g[group_of_[n]]);
    return lagrangian_value(scenario_, subsidy, per_target, levels_);
  }

  // Total discounted work of the subsidy policies minus K / (1 - beta).
  double supergradient(double subsidy) {
    const auto& g = grids(subsidy);
    double work = 0.0;
    for (std::size_t n = 0; n < group_of_.size(); ++n)
      work += subsidy_policy_work(scenario_.targets[n], g[group_of_[n]], levels_[n], scenario_.discount);
    return work - scenario_.radars / (1.0 - scenario_.discount);
  }

  long extrapolations(double subsidy) {
    long total = 0;
    for (const auto& g : grids(subsidy)) total += g.extrapolations;
    return total;
  }

 private:
  const std::vector<ValueGrid>* nearest(double subsidy) const {
    if (cache_.empty()) return nullptr;
    auto hi = cache_.lower_bound(subsidy);
    if (hi == cache_.end()) return &std::prev(hi)->second;
    if (hi == cache_.begin()) return &hi->second;
    auto lo = std::prev(hi);
    return subsidy - lo->first <= hi->first - subsidy ? &lo->second : &hi->second;
  }

  const ScenarioSpec& scenario_;
  std::vector<double> levels_;
  const DualOptions& options_;
  std::vector<std::size_t> representatives_;
  std::vector<std::size_t> group_of_;
  std::map<double, std::vector<ValueGrid>> cache_;
};

DualResult finish(std::vector<DualProbe> trace, double subsidy_max) {
  DualResult r;
  r.subsidy_max = subsidy_max;
  r.bound = -std::numeric_limits<double>::infinity();
  for (const auto& p : trace)
    if (p.value > r.bound) {
      r.bound = p.value;
      r.best_subsidy = p.subsidy;
    }
  r.trace = std::move(trace);
  return r;
}

}  // namespace

DualResult dual_search(const ScenarioSpec& scenario, std::span<const double> initial_levels,
                       const DualOptions& options) {
  if (initial_levels.size() != scenario.targets.size())
    throw std::invalid_argument("dual_search: one initial level per target");
  DualEvaluator eval(scenario, initial_levels, options);

  double upper = 0.0;
  if (options.subsidy_max) {
    upper = *options.subsidy_max;
    if (!(upper > 0.0)) throw DualSetupError("lambda_max must be positive");
    const double slope = eval.supergradient(upper);
    if (slope > 0.0)
      throw DualSetupError("lambda_max = " + format_double(upper) +
                           " does not bracket the dual maximizer (supergradient " + format_double(slope) + ")");
  } else {
    upper = 1.0;
    int doublings = 0;
    while (eval.supergradient(upper) > 0.0) {
      if (++doublings > 60) throw DualSetupError("no bracketing lambda_max found");
      upper *= 2.0;
    }
  }
  const double width = options.search_tol.value_or(1e-3 * upper);
  if (!(width > 0.0)) throw DualSetupError("search tolerance must be positive");

  std::vector<DualProbe> trace;
  auto f = [&](double lambda) { return eval.value(lambda); };
  trace.push_back({0.0, f(0.0)});
  golden_section_maximize(f, 0.0, upper, width, trace);
  trace.push_back({upper, f(upper)});
  DualResult r = finish(std::move(trace), upper);
  r.extrapolations = eval.extrapolations(r.best_subsidy);
  if (r.extrapolations > 0)
    log::info("dual bound: " + std::to_string(r.extrapolations) + " grid images above the TEV grid at lambda* = " +
              format_double(r.best_subsidy));
  return r;
}

namespace {

double tree_value(const TargetSpec& target, double subsidy, double discount, const TecState& p, int remaining) {
  if (remaining == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= 1; ++a) {
    const double v = cost(p, a, target) + subsidy * a +
                     discount * tree_value(target, subsidy, discount, phi(p, a, target), remaining - 1);
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

double finite_horizon_value(const TargetSpec& target, double subsidy, double discount, const TecState& initial,
                            int horizon) {
  if (horizon < 0 || horizon > 24) throw std::invalid_argument("finite_horizon_value: horizon must be in [0, 24]");
  return tree_value(target, subsidy, discount, initial, horizon);
}

DualResult finite_horizon_dual(const ScenarioSpec& scenario, std::span<const TecState> initial, int horizon,
                               double search_tol) {
  if (initial.size() != scenario.targets.size())
    throw std::invalid_argument("finite_horizon_dual: one initial state per target");
  double budget = 0.0;
  double disc = 1.0;
  for (int t = 0; t < horizon; ++t, disc *= scenario.discount) budget += scenario.radars * disc;
  auto f = [&](double lambda) {
    double total = -lambda * budget;
    for (std::size_t n = 0; n < initial.size(); ++n)
      total += finite_horizon_value(scenario.targets[n], lambda, scenario.discount, initial[n], horizon);
    return total;
  };
  // Concavity: once L(2x) < L(x) the maximizer lies below 2x.
  double upper = 1.0;
  for (int i = 0; f(upper) >= f(upper / 2.0); ++i) {
    if (i > 60) throw DualSetupError("no bracketing lambda_max found");
    upper *= 2.0;
  }
  std::vector<DualProbe> trace;
  trace.push_back({0.0, f(0.0)});
  golden_section_maximize(f, 0.0, upper, search_tol, trace);
  return finish(std::move(trace), upper);
}

void write_dual_trace_csv(std::ostream& out, const DualResult& result) {
  CsvWriter w(out);
  w.header({"lambda", "L_value"});
  for (const auto& p : result.trace) {
    w.field(p.subsidy).field(p.value);
    w.end_row();
  }
  w.header({"lambda_star", "V_D"});
  w.field(result.best_subsidy).field(result.bound);
  w.end_row();
}

}  // namespace beamsched
