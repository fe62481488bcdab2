#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "beamsched/bound.hpp"
#include "beamsched/error.hpp"
#include "beamsched/presets.hpp"
#include "beamsched/sim.hpp"
#include "support.hpp"

using namespace beamsched;
using doctest::Approx;

namespace {

// Linear interpolation on a uniform grid, extended linearly at both ends.
double lerp(const std::vector<double>& v, double lo, double step, double x) {
  const double pos = (x - lo) / step;
  const auto n = static_cast<long>(v.size());
  long i = static_cast<long>(std::floor(pos));
  i = std::clamp(i, 0L, n - 2);
  const double w = pos - static_cast<double>(i);
  return v[i] + w * (v[i + 1] - v[i]);
}

// Backward induction of the horizon-H subsidy problem on the grid, from a zero
// terminal value.
std::vector<double> backward_dp(const testing::ScalarModel& m, double subsidy, double beta, double lo, double step,
                                int points, int horizon) {
  std::vector<double> v(points, 0.0), next(points);
  for (int k = 0; k < horizon; ++k) {
    for (int i = 0; i < points; ++i) {
      const double p = lo + step * i;
      const double passive = m.cost(p, 0) + beta * lerp(v, lo, step, m.passive(p));
      const double active = m.cost(p, 1) + subsidy + beta * lerp(v, lo, step, m.active(p));
      next[i] = std::min(passive, active);
    }
    v.swap(next);
  }
  return v;
}

const UniformGrid kGrid = UniformGrid::between(0.01, 50.0, 0.01);

}  // namespace

TEST_CASE("uniform grid") {
  CHECK(kGrid.points == 5000);
  CHECK(kGrid.at(0) == 0.01);
  CHECK(kGrid.hi() == Approx(50.0));
}

TEST_CASE("zero costs give a zero value function") {
  auto t = testing::reckless();
  t.weight = 0.0;
  const auto v = value_iterate(t, 0.7, 0.9, kGrid);
  CHECK(*std::max_element(v.values.begin(), v.values.end()) == 0.0);
  CHECK(*std::min_element(v.values.begin(), v.values.end()) == 0.0);
}

TEST_CASE("one-step problem when the discount vanishes") {
  const auto t = testing::reckless(4.0, 2.0);
  const auto v = value_iterate(t, 0.3, 1e-9, kGrid);
  for (int i : {0, 99, 1234, 4999}) CHECK(v.values[i] == Approx(2.0 * kGrid.at(i)).epsilon(1e-6));
}

TEST_CASE("value iteration agrees with a long finite-horizon DP on the same grid") {
  const auto model = testing::ScalarModel::reckless(4.0);
  const auto v = value_iterate(testing::reckless(4.0), 0.0, 0.9, kGrid);
  const auto oracle = backward_dp(model, 0.0, 0.9, kGrid.lo, kGrid.step, kGrid.points, 200);
  double worst = 0.0;
  for (int i = 0; i < kGrid.points; i += 7) worst = std::max(worst, std::abs(v.values[i] - oracle[i]));
  CHECK(worst < 1e-3);

  const auto vs = value_iterate(testing::reckless(4.0), 3.0, 0.9, kGrid);
  const auto os = backward_dp(model, 3.0, 0.9, kGrid.lo, kGrid.step, kGrid.points, 200);
  worst = 0.0;
  for (int i = 0; i < kGrid.points; i += 7) worst = std::max(worst, std::abs(vs.values[i] - os[i]));
  CHECK(worst < 1e-3);
}

TEST_CASE("value iteration contracts") {
  const auto v = value_iterate(testing::cautious(4.0), 2.0, 0.9, kGrid);
  REQUIRE(v.residuals.size() > 10);
  CHECK(v.iterations == static_cast<int>(v.residuals.size()));
  // After the first sweeps every residual is at most beta times the last, with
  // 10% slack for interpolation.
  for (std::size_t k = 5; k + 1 < v.residuals.size(); ++k)
    CHECK(v.residuals[k + 1] <= 1.1 * 0.9 * v.residuals[k] + 1e-15);
  CHECK(v.residual <= 1e-6 * 0.1 / 0.9);
}

TEST_CASE("warm start reaches the same fixed point") {
  const auto t = testing::reckless(4.0);
  const auto cold = value_iterate(t, 2.0, 0.9, kGrid);
  const auto near = value_iterate(t, 2.2, 0.9, kGrid);
  ValueIterationOptions opt;
  opt.warm_start = &near;
  const auto warm = value_iterate(t, 2.0, 0.9, kGrid, opt);
  CHECK(warm.iterations < cold.iterations);
  for (int i = 0; i < kGrid.points; i += 97) CHECK(warm.values[i] == Approx(cold.values[i]).epsilon(1e-6));
}

TEST_CASE("value iteration failures") {
  const auto t = testing::reckless(4.0);
  ValueIterationOptions opt;
  opt.max_iterations = 3;
  CHECK_THROWS_AS(value_iterate(t, 1.0, 0.9, kGrid, opt), ConvergenceError);
  // Active images of states near 5 land below a grid starting there.
  CHECK_THROWS_AS(value_iterate(t, 1.0, 0.9, UniformGrid::between(5.0, 50.0, 0.05)), NumericalError);
}

TEST_CASE("greedy work is non-increasing in the subsidy") {
  const auto t = testing::cautious(6.0);
  double prev = 1e300;
  for (double lam : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const auto v = value_iterate(t, lam, 0.9, kGrid);
    const double w = subsidy_policy_work(t, v, 1.0, 0.9);
    CHECK(w <= prev + 1e-12);
    prev = w;
  }
  const auto v0 = value_iterate(t, 0.0, 0.9, kGrid);
  CHECK(subsidy_action(t, v0, 1.0, 0.9) == 1);
  CHECK(subsidy_policy_work(t, v0, 1.0, 0.9) == Approx(10.0).epsilon(1e-9));
}

TEST_CASE("lagrangian value composition") {
  const auto sc = testing::scenario_of({testing::reckless(4.0), testing::reckless(4.0), testing::reckless(4.0)}, 1);
  const auto v0 = value_iterate(sc.targets[0], 0.0, 0.9, kGrid);
  const std::vector<const ValueGrid*> grids0{&v0, &v0, &v0};
  const std::vector<double> levels{0.7, 1.3, 0.2};
  CHECK(lagrangian_value(sc, 0.0, grids0, levels) == v0(0.7) + v0(1.3) + v0(0.2));

  const auto v = value_iterate(sc.targets[0], 1.5, 0.9, kGrid);
  const std::vector<const ValueGrid*> grids{&v, &v, &v};
  const std::vector<double> same{0.9, 0.9, 0.9};
  CHECK(lagrangian_value(sc, 1.5, grids, same) == Approx(3.0 * v(0.9) - 1.5 / 0.1));
}

TEST_CASE("dual search on degenerate and small instances") {
  auto zero = testing::scenario_of({testing::reckless(), testing::cautious()}, 1);
  for (auto& t : zero.targets) t.weight = 0.0;
  const std::vector<double> lv{0.5, 1.5};
  const auto z = dual_search(zero, lv);
  CHECK(z.bound == 0.0);
  CHECK(z.best_subsidy == 0.0);

  const auto sc = testing::scenario_of({testing::reckless(4.0), testing::cautious(3.0, 2.0)}, 1);
  const auto r = dual_search(sc, lv);
  CHECK(r.bound > 0.0);
  CHECK(r.best_subsidy > 0.0);
  CHECK(r.best_subsidy < r.subsidy_max);
  // V^D is the best probed value.
  double best = -1e300;
  for (const auto& pr : r.trace) best = std::max(best, pr.value);
  CHECK(r.bound == best);

  // Quasi-concavity witness over every probed triple.
  auto trace = r.trace;
  std::sort(trace.begin(), trace.end(), [](auto& a, auto& b) { return a.subsidy < b.subsidy; });
  int violations = 0;
  for (std::size_t i = 0; i < trace.size(); ++i)
    for (std::size_t j = i + 1; j < trace.size(); ++j)
      for (std::size_t k = j + 1; k < trace.size(); ++k)
        if (trace[j].value < std::min(trace[i].value, trace[k].value) - 1e-6) ++violations;
  CHECK(violations == 0);

  const auto again = dual_search(sc, lv);
  CHECK(again.bound == r.bound);
  CHECK(again.best_subsidy == r.best_subsidy);

  DualOptions tight;
  tight.subsidy_max = 0.01;
  CHECK_THROWS_AS(dual_search(sc, lv, tight), DualSetupError);

  DualOptions given;
  given.subsidy_max = 2.0 * r.subsidy_max;
  const auto wide = dual_search(sc, lv, given);
  CHECK(wide.bound == Approx(r.bound).epsilon(1e-4));
}

TEST_CASE("single target bound stays below the always-track cost") {
  ScenarioSpec one;
  one.targets = {testing::reckless(4.0)};
  one.radars = 1;
  const std::vector<double> lv{1.0};
  const auto r = dual_search(one, lv);
  const auto m = testing::ScalarModel::reckless(4.0);
  double c = 0.0, disc = 1.0, p = 1.0;
  for (int t = 0; t < 400; ++t, disc *= 0.9) {
    c += disc * p;
    p = m.active(p);
  }
  CHECK(r.bound <= c + 1e-6);
  CHECK(r.bound == Approx(c).epsilon(1e-3));
}

TEST_CASE("dual bound lies below simulated policy costs") {
  const auto sc = testing::scenario_of({testing::reckless(4.0), testing::reckless(2.0), testing::cautious(3.0),
                                        testing::cautious(5.0)},
                                       1, 200);
  const auto est = replicated_dual_bound(sc, 11, 4, 1);
  REQUIRE(est.per_replication.size() == 4);
  for (int r = 0; r < 4; ++r) {
    const auto seed = replication_seed(11, r);
    for (auto kind : {PolicyKind::whittle_mp, PolicyKind::myopic, PolicyKind::tec_trace}) {
      const auto ep = run_episode(sc, {kind, true}, 200, seed);
      CHECK(ep.discounted_cost >= est.per_replication[r].bound - 1e-6);
    }
  }
}

TEST_CASE("lagrangian value is reproducible at a fixed subsidy") {
  const auto sc = constant_noise_scenario(8, false);
  std::vector<ValueGrid> grids;
  for (const auto& t : sc.targets) grids.push_back(value_iterate(t, 3.0, sc.discount, kGrid));
  std::vector<const ValueGrid*> ptrs;
  for (const auto& g : grids) ptrs.push_back(&g);
  std::vector<double> lv;
  for (const auto& s : initial_states(sc, 5)) lv.push_back(s.value());
  const double a = lagrangian_value(sc, 3.0, ptrs, lv);
  std::vector<ValueGrid> grids2;
  for (const auto& t : sc.targets) grids2.push_back(value_iterate(t, 3.0, sc.discount, kGrid));
  std::vector<const ValueGrid*> ptrs2;
  for (const auto& g : grids2) ptrs2.push_back(&g);
  CHECK(lagrangian_value(sc, 3.0, ptrs2, lv) == a);
}

TEST_CASE("finite-horizon subsidy value by hand") {
  const auto t = testing::reckless(4.0);
  const auto m = testing::ScalarModel::reckless(4.0);
  const double lam = 0.8, p = 1.3;
  CHECK(finite_horizon_value(t, lam, 0.9, TecState::scalar(p), 1) == Approx(p));
  const double two = std::min(p + 0.9 * m.passive(p), p + lam + 0.9 * m.active(p));
  CHECK(finite_horizon_value(t, lam, 0.9, TecState::scalar(p), 2) == Approx(two).epsilon(1e-14));
  // Longer horizons converge toward the infinite-horizon grid value.
  const auto v = value_iterate(t, lam, 0.9, kGrid);
  const double h20 = finite_horizon_value(t, lam, 0.9, TecState::scalar(p), 20);
  CHECK(h20 <= v(p) + 1e-3);
  CHECK(h20 >= v(p) - std::pow(0.9, 20) * 10.0 * 40.0);
}

TEST_CASE("golden section finds the maximum of a concave function") {
  std::vector<DualProbe> trace;
  const double x = golden_section_maximize([](double l) { return -(l - 2.7) * (l - 2.7); }, 0.0, 10.0, 1e-6, trace);
  CHECK(x == Approx(2.7).epsilon(1e-5));
  CHECK(trace.size() > 20);
}
