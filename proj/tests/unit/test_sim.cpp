#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "beamsched/presets.hpp"
#include "beamsched/sim.hpp"
#include "support.hpp"

using namespace beamsched;
using doctest::Approx;

TEST_CASE("scalar initial draws stay inside the support") {
  const auto t = testing::reckless();
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const double v = sample_initial(t, rng).value();
    CHECK(v > 0.0);
    CHECK(v < 2.0);
  }
  Rng a(5), b(5);
  CHECK(sample_initial(t, a) == sample_initial(t, b));
}

TEST_CASE("Gram initial draws are symmetric positive definite") {
  const auto t = kinematic_target(TargetType::cautious, 4.0);
  Rng rng(78);
  int redraws = 0;
  for (int i = 0; i < 500; ++i) {
    const auto p = sample_initial(t, rng, &redraws);
    CHECK(p.dim() == 4);
    CHECK(testing::symmetric(p.matrix()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(p.matrix()));
    CHECK(eig.eigenvalues().minCoeff() >= kGramMinEigenvalue);
  }
  CHECK(redraws >= 0);
}

TEST_CASE("fixed initial states are returned unchanged") {
  auto t = testing::reckless();
  t.initial = FixedInitial{scalar_matrix(0.25)};
  Rng rng(1);
  CHECK(sample_initial(t, rng).value() == 0.25);
}

TEST_CASE("zero horizon costs nothing") {
  const auto sc = radar_table_scenario(Population::reckless, false, 1);
  const auto ep = run_episode(sc, {}, 0, 3);
  CHECK(ep.discounted_cost == 0.0);
  CHECK(ep.actions.empty());
}

TEST_CASE("closed-loop cost of always tracking, by hand for three slots") {
  ScenarioSpec one;
  one.targets = {testing::reckless(4.0, 2.0)};
  one.targets[0].initial = FixedInitial{scalar_matrix(0.6)};
  one.radars = 1;
  const auto m = testing::ScalarModel::reckless(4.0);
  double expect = 0.0, p = 0.6, disc = 1.0;
  for (int t = 0; t < 3; ++t, disc *= 0.9) {
    expect += disc * 2.0 * p;
    p = m.active(p);
  }
  const auto ep = run_episode(one, {PolicyKind::tec_trace, true}, 3, 1);
  CHECK(ep.discounted_cost == Approx(expect).epsilon(1e-14));
  for (const auto& a : ep.actions) CHECK(a == ActionVector{1});
  CHECK(ep.final_states[0].value() == Approx(p).epsilon(1e-14));
}

TEST_CASE("episodes are feasible and replay bit-identically") {
  const auto sc = radar_table_scenario(Population::mixed, true, 2);
  for (auto kind : {PolicyKind::whittle_mp, PolicyKind::myopic, PolicyKind::tec_trace}) {
    const auto a = run_episode(sc, {kind, true}, 100, 1234);
    const auto b = run_episode(sc, {kind, true}, 100, 1234);
    CHECK(a.discounted_cost == b.discounted_cost);
    CHECK(a.actions == b.actions);
    CHECK(a.final_states == b.final_states);
    for (const auto& slot : a.actions) CHECK(std::accumulate(slot.begin(), slot.end(), 0) <= sc.radars);
    CHECK(a.discounted_work <= sc.radars / (1.0 - sc.discount) + 1e-12);
    CHECK(a.discounted_cost >= 0.0);
    CHECK(schedule_cost(sc, a.initial_states, a.actions) == Approx(a.discounted_cost).epsilon(1e-14));
  }
}

TEST_CASE("truncation bias is within the geometric tail bound") {
  const auto sc = radar_table_scenario(Population::cautious, true, 1);
  const auto t100 = run_episode(sc, {}, 100, 9);
  const auto t200 = run_episode(sc, {}, 200, 9);
  const double bias = t200.discounted_cost - t100.discounted_cost;
  CHECK(bias >= 0.0);
  CHECK(bias <= t200.max_slot_cost * std::pow(0.9, 100) / 0.1);
  CHECK(t100.tail_bound(0.9) == Approx(t100.max_slot_cost * std::pow(0.9, 100) / 0.1));
}

TEST_CASE("monte carlo pairs initial states across policies") {
  auto sc = radar_table_scenario(Population::reckless, true, 1);
  const std::vector<PolicyOptions> kinds{{PolicyKind::whittle_mp, true}, {PolicyKind::tec_trace, true}};
  MonteCarloOptions opt;
  opt.replications = 1;
  opt.master_seed = 8;
  const auto one = monte_carlo(sc, kinds, opt);
  REQUIRE(one.policies.size() == 2);
  CHECK(one.policies[0].standard_error == 0.0);
  const auto ep = run_episode(sc, kinds[0], sc.horizon, replication_seed(8, 0));
  CHECK(one.policies[0].mean_cost == ep.discounted_cost);

  opt.replications = 6;
  opt.threads = 3;
  const auto par = monte_carlo(sc, kinds, opt);
  opt.threads = 1;
  const auto seq = monte_carlo(sc, kinds, opt);
  CHECK(par.policies[0].costs == seq.policies[0].costs);
  CHECK(par.policies[1].mean_cost == seq.policies[1].mean_cost);

  for (int r = 0; r < 6; ++r) {
    const auto s = initial_states(sc, replication_seed(8, r));
    Rng ties(0);
    const auto e = run_episode_from(sc, kinds[1], sc.horizon, s, ties);
    CHECK(e.discounted_cost == seq.policies[1].costs[r]);
  }

  const auto& c = seq.policies[0].costs;
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / 6.0;
  double ss = 0.0;
  for (double x : c) ss += (x - mean) * (x - mean);
  CHECK(seq.policies[0].standard_error == Approx(std::sqrt(ss / 5.0) / std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("deterministic initial states are shared by every policy") {
  auto sc = testing::scenario_of({testing::reckless(), testing::cautious()}, 1);
  sc.targets[0].initial = FixedInitial{scalar_matrix(0.3)};
  sc.targets[1].initial = FixedInitial{scalar_matrix(1.2)};
  const std::vector<PolicyOptions> kinds{{PolicyKind::myopic, true}, {PolicyKind::tec_trace, true}};
  for (const auto& k : kinds) {
    const auto ep = run_episode(sc, k, 5, 99);
    CHECK(ep.initial_states[0].value() == 0.3);
    CHECK(ep.initial_states[1].value() == 1.2);
  }
}

TEST_CASE("suboptimality gap") {
  CHECK(suboptimality_gap(50.0, 50.0) == 0.0);
  CHECK(suboptimality_gap(103.0, 100.0) == Approx(3.0));
  CHECK_THROWS_AS(suboptimality_gap(1.0, 0.0), std::domain_error);
}

TEST_CASE("results CSV layout") {
  auto sc = radar_table_scenario(Population::reckless, false, 2);
  const std::vector<PolicyOptions> kinds{{PolicyKind::whittle_mp, true}};
  MonteCarloOptions opt;
  opt.replications = 2;
  auto res = monte_carlo(sc, kinds, opt);
  attach_gaps(res, 0.9 * res.policies[0].mean_cost);
  std::ostringstream os;
  const std::vector<ExperimentResult> all{res};
  write_results_csv(os, all);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "scenario_id,policy,K,N,N_mc,mean_cost,stderr,gap_percent,seed,runtime_ms,tail_bound,index_anomalies");
  CHECK(row.find(",whittle_mp,2,8,2,") != std::string::npos);
}
