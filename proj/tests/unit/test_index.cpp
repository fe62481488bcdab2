#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "beamsched/error.hpp"
#include "beamsched/index.hpp"
#include "beamsched/policy.hpp"
#include "beamsched/presets.hpp"
#include "support.hpp"

using namespace beamsched;
using doctest::Approx;

namespace {
const IndexSettings kSettings{0.9, 100};
}

TEST_CASE("threshold boundary is passive") {
  CHECK(threshold_active(TecState::scalar(3.0), {2.0}) == 1);
  CHECK(threshold_active(TecState::scalar(2.0), {2.0}) == 0);
  CHECK(threshold_active(TecState(identity(4)), {0.5}) == 1);
  CHECK(threshold_active(TecState::scalar(1e300), Threshold::never()) == 0);
  CHECK(threshold_active(TecState::scalar(1e-300), Threshold::always()) == 1);
}

TEST_CASE("metrics of the never and always policies") {
  const auto t = testing::reckless(4.0);
  const auto never = metrics(TecState::scalar(1.0), Threshold::never(), t, kSettings);
  CHECK(never.work == 0.0);
  const auto always = metrics(TecState::scalar(1.0), Threshold::always(), t, kSettings);
  CHECK(always.work == Approx((1.0 - std::pow(0.9, 100)) / 0.1).epsilon(1e-12));

  // Passive-forever cost from the hand recursion.
  double f = 0.0, disc = 1.0, p = 1.0;
  for (int k = 0; k < 100; ++k, disc *= 0.9) {
    f += disc * p;
    p = 0.9 * (1.21 * p + 1.0) + 0.1 * (1.69 * p + 4.0);
  }
  CHECK(never.cost == Approx(f).epsilon(1e-12));
}

TEST_CASE("metrics agree with the two-trajectory oracle") {
  const auto model = testing::ScalarModel::reckless(4.0);
  const auto t = testing::reckless(4.0);
  for (double p : {0.2, 1.0, 3.7, 12.0})
    for (double z : {0.5, 1.0, 4.0, 10.0})
      for (int first : {0, 1}) {
        double c, w;
        model.unroll(p, z, first, 0.9, 100, c, w);
        const auto m = metrics(TecState::scalar(p), {z}, t, kSettings, first);
        CHECK(m.cost == Approx(c).epsilon(1e-12));
        CHECK(m.work == Approx(w).epsilon(1e-12));
      }
}

TEST_CASE("marginal work") {
  const auto t = testing::reckless(4.0);
  const auto mm = marginal_metrics(TecState::scalar(1.0), {1.0}, t, kSettings);
  CHECK(mm.work > 0.0);
  for (double p : {0.01, 1.0, 19.0}) {
    CHECK(marginal_metrics(TecState::scalar(p), Threshold::never(), t, kSettings).work == 1.0);
    CHECK(marginal_metrics(TecState::scalar(p), Threshold::never(), testing::cautious(10.0), kSettings).work == 1.0);
  }
  CHECK_FALSE(MarginalMetrics{1.0, 0.0}.ratio().has_value());
  CHECK(MarginalMetrics{1.0, 2.0}.ratio() == 0.5);
}

TEST_CASE("mp index matches the oracle and is non-decreasing") {
  const auto model = testing::ScalarModel::reckless(4.0);
  const auto t = testing::reckless(4.0);
  double prev = -std::numeric_limits<double>::infinity();
  int decreases = 0;
  for (double p : make_grid(0.01, 20.0, 0.01)) {
    const double v = mp_index(TecState::scalar(p), t, kSettings).value;
    if (v < prev - 1e-9) ++decreases;
    prev = v;
  }
  CHECK(decreases == 0);
  for (double p : {0.05, 0.5, 1.0, 2.0, 6.5, 15.0})
    CHECK(mp_index(TecState::scalar(p), t, kSettings).value == Approx(model.mp(p)).epsilon(1e-10));
}

TEST_CASE("mp index vanishes with a one-slot truncation") {
  for (double p : {0.01, 1.0, 9.0}) {
    CHECK(mp_index(TecState::scalar(p), testing::reckless(4.0), {0.9, 1}).value == 0.0);
    CHECK(mp_index(TecState::scalar(p), testing::cautious(10.0), {0.9, 1}).value == 0.0);
  }
}

TEST_CASE("cautious targets index higher at the same state and noise") {
  for (double p : {0.5, 1.0, 2.0, 5.0, 10.0, 19.0})
    CHECK(mp_index(TecState::scalar(p), testing::cautious(4.0), kSettings).value >
          mp_index(TecState::scalar(p), testing::reckless(4.0), kSettings).value);
}

TEST_CASE("baseline indices") {
  CHECK(tec_index(TecState::scalar(1.0), testing::reckless()).value == 1.0);
  CHECK(tec_index(TecState::scalar(0.37), testing::reckless(4.0, 2.0)).value == Approx(0.74));
  CHECK(tec_index(TecState(identity(4)), kinematic_target(TargetType::reckless, 4.0, 5.0)).value == Approx(5.0));

  CHECK(myopic_index(TecState::scalar(1.0), testing::reckless(4.0)).value == Approx(1.16415).epsilon(1e-5));
  // 2.384 - (0.6 * 2 * 2.21 / 4.21 + 0.4 * 2 * 5.69 / 7.69) = 1.162136...
  const double cautious_myopic = 2.384 - (0.6 * 4.42 / 4.21 + 0.4 * 11.38 / 7.69);
  CHECK(myopic_index(TecState::scalar(1.0), testing::cautious(4.0)).value == Approx(cautious_myopic).epsilon(1e-12));
  CHECK(cautious_myopic == Approx(1.16214).epsilon(1e-5));
  const auto model = testing::ScalarModel::cautious(4.0);
  CHECK(myopic_index(TecState::scalar(3.3), testing::cautious(4.0)).value ==
        Approx(model.passive(3.3) - model.active(3.3)).epsilon(1e-14));

  auto blind = testing::reckless();
  blind.probs.active = blind.probs.passive;
  blind.meas.H = scalar_matrix(0.0);
  CHECK(myopic_index(TecState::scalar(2.0), blind).value == Approx(0.0));
}

TEST_CASE("index table lookups") {
  const auto t = testing::reckless(4.0);
  const auto single = index_table(t, kSettings, make_grid(1.0, 1.5, 2.0));
  CHECK(single.grid().size() == 1);
  CHECK(single(0.1) == single(1.0));
  CHECK(single(7.0) == single(1.0));

  const auto grid = make_grid(0.5, 3.0, 0.25);
  const auto table = index_table(t, kSettings, grid);
  for (double p : grid) CHECK(table(p) == mp_index(TecState::scalar(p), t, kSettings).value);
  const double mid = table(0.625);
  CHECK(mid == Approx(0.5 * (table(0.5) + table(0.75))));
  CHECK(table(100.0) == table(3.0));

  const auto fine = index_table(t, kSettings, make_grid(0.01, 20.0, 0.01));
  const auto v = fine.values();
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] >= v[i - 1] - 1e-9);

  const std::vector<double> unsorted{1.0, 0.5};
  CHECK_THROWS_AS(index_table(t, kSettings, unsorted), std::invalid_argument);
}

TEST_CASE("tabulate_indices fills every column") {
  const auto rows = tabulate_indices(testing::cautious(4.0), kSettings, make_grid(1.0, 2.0, 0.5));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].level == 1.0);
  CHECK(rows[0].tec == 1.0);
  CHECK(rows[0].myopic == Approx(1.16214).epsilon(1e-5));
  CHECK(rows[0].mp.has_value());
  CHECK(rows[0].marginal_work > 0.0);
}

TEST_CASE("matrix mp index is finite and ordered on isotropic states") {
  const auto t = kinematic_target(TargetType::reckless, 4.0);
  double prev = -1e300;
  for (double level : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double v = mp_index(TecState(identity(4) * level), t, kSettings).value;
    CHECK(std::isfinite(v));
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
}

TEST_CASE("common weight scaling scales indices and keeps selections") {
  std::vector<TargetSpec> base{testing::reckless(2.0, 5.0), testing::reckless(3.0), testing::cautious(4.0),
                               testing::cautious(5.0, 2.0)};
  const std::vector<TecState> states{TecState::scalar(0.4), TecState::scalar(1.7), TecState::scalar(1.1),
                                     TecState::scalar(0.9)};
  const double c = 3.5;
  ScenarioSpec a = testing::scenario_of(base, 2);
  ScenarioSpec b = a;
  for (auto& t : b.targets) t.weight *= c;
  for (auto kind : {PolicyKind::whittle_mp, PolicyKind::myopic, PolicyKind::tec_trace}) {
    for (int n = 0; n < 4; ++n)
      CHECK(policy_index(states[n], b.targets[n], kind, kSettings) ==
            Approx(c * policy_index(states[n], a.targets[n], kind, kSettings)).epsilon(1e-12));
    Rng r1(7), r2(7);
    CHECK(decide(states, a, {kind, true}, r1) == decide(states, b, {kind, true}, r2));
  }
}

TEST_CASE("index anomaly carries its location") {
  const IndexAnomaly e(1.5, 1.5, -0.25);
  CHECK(e.code() == ErrorCode::index_anomaly);
  CHECK(static_cast<int>(e.code()) == 3);
  CHECK(e.state() == 1.5);
  CHECK(e.marginal_work() == -0.25);
}
