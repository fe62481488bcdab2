#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "beamsched/index.hpp"
#include "beamsched/pcl.hpp"
#include "beamsched/presets.hpp"
#include "support.hpp"

using namespace beamsched;
using doctest::Approx;

namespace {
const std::vector<double> kStates = make_grid(0.01, 20.0, 0.01);
const std::vector<double> kZ{4.0, 10.0};
}  // namespace

TEST_CASE("never-track column has unit marginal work") {
  const std::vector<double> never{Threshold::never().z};
  const auto r = probe_marginal_work(testing::cautious(10.0), make_grid(0.01, 5.0, 0.07), never);
  REQUIRE(r.min_work.has_value());
  CHECK(r.min_work->work == 1.0);
  for (const auto& row : r.rows) CHECK(row.work == 1.0);
  CHECK(r.pass);
}

TEST_CASE("marginal work is positive on the reference configurations") {
  for (auto type : {TargetType::reckless, TargetType::cautious})
    for (double q : {4.0, 10.0}) {
      const auto r = probe_marginal_work(scalar_target(type, q), kStates, kZ);
      CAPTURE(q);
      CHECK(r.rows.size() == kStates.size() * kZ.size());
      CHECK(r.nonpositive_work.empty());
      CHECK(r.min_work->work > 0.0);
      CHECK(r.pass);
    }
}

TEST_CASE("probes are descriptive for adversarial targets") {
  auto t = testing::reckless(4.0);
  t.probs.passive = {0.1, 0.9};
  t.probs.active = {0.8, 0.2};
  const auto r = probe_marginal_work(t, make_grid(0.1, 5.0, 0.1), kZ);
  CHECK(r.rows.size() == 100);
  CHECK(r.min_work.has_value());

  TargetSpec burst = testing::reckless();
  burst.modes = {DynamicsMode::scalar("slow", 1.0, 0.5), DynamicsMode::scalar("burst", 3.0, 1.0)};
  burst.probs = {{0.99, 0.01}, {0.01, 0.99}};
  const auto reg = probe_index_regularity(burst, make_grid(0.05, 20.0, 0.05));
  CHECK_FALSE(reg.violations.empty());
  CHECK_FALSE(reg.pass);
  const auto& v = reg.violations.front();
  CHECK(v.mp_hi < v.mp_lo - 1e-9);
  CHECK(v.state_hi > v.state_lo);
}

TEST_CASE("index regularity on the reference configurations") {
  for (double q : {4.0, 10.0}) {
    const auto r = probe_index_regularity(testing::reckless(q), kStates);
    CHECK(r.violations.empty());
    CHECK_FALSE(r.partial);
    CHECK(r.pass);
    REQUIRE(r.max_jump.has_value());
    CHECK(*r.max_jump_per_step == Approx(*r.max_jump / 0.01));
    CHECK(r.min_index.has_value());
  }
}

TEST_CASE("degenerate zero-cost target has a zero index") {
  auto t = testing::reckless();
  t.weight = 0.0;
  const auto r = probe_index_regularity(t, make_grid(0.5, 5.0, 0.5));
  for (const auto& row : r.rows) CHECK(row.mp == 0.0);
  CHECK(r.pass);
}

TEST_CASE("cautious dominance") {
  const auto grid = make_grid(0.01, 20.0, 0.05);
  const auto r4 = probe_index_regularity(testing::reckless(4.0), grid);
  const auto c4 = probe_index_regularity(testing::cautious(4.0), grid);
  CHECK(dominance_violations(r4, c4, 1e-9).empty());
  // At the higher CT noise the ordering flips for small variances.
  const auto r10 = probe_index_regularity(testing::reckless(10.0), grid);
  const auto c10 = probe_index_regularity(testing::cautious(10.0), grid);
  const auto bad = dominance_violations(r10, c10, 1e-9);
  CHECK_FALSE(bad.empty());
  for (double p : bad) CHECK(p < 3.5);
}

TEST_CASE("index versus CT noise") {
  const auto qs = make_grid(0.5, 40.0, 0.5);
  const auto low = probe_index_vs_noise(testing::reckless(), 1.0, qs);
  const auto high = probe_index_vs_noise(testing::reckless(), 10.0, qs);
  REQUIRE(low.size() == qs.size());
  int high_down = 0;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    high_down += *high[i].mp < *high[i - 1].mp;
    // At P = 1 the curve dips until q_ct = 3 and rises from there on.
    const bool rising = *low[i].mp > *low[i - 1].mp;
    CHECK(rising == (qs[i] > 3.0));
    CHECK(*low[i].mp == Approx(testing::ScalarModel::reckless(qs[i]).mp(1.0)).epsilon(1e-10));
  }
  CHECK(high_down == static_cast<int>(qs.size()) - 1);

  // Equal CT and CV noise: compare with the hand-written model at q_ct = 1.
  const std::vector<double> one{1.0};
  const auto same = probe_index_vs_noise(testing::reckless(), 2.0, one);
  CHECK(*same[0].mp == Approx(testing::ScalarModel::reckless(1.0).mp(2.0)).epsilon(1e-10));
}

TEST_CASE("probe reports are pure") {
  const auto grid = make_grid(0.1, 3.0, 0.1);
  const auto a = probe_index_regularity(testing::cautious(4.0), grid);
  ProbeSettings par;
  par.threads = 3;
  const auto b = probe_index_regularity(testing::cautious(4.0), grid, par);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].mp == b.rows[i].mp);
  std::ostringstream x, y;
  write_probe_csv(x, a);
  write_probe_csv(y, b);
  CHECK(x.str() == y.str());
  CHECK(x.str().rfind("P,z,g,mp_star,f\n", 0) == 0);
  CHECK(probe_summary("c4", a).find("PASS") != std::string::npos);
}
