#pragma once

#include <cmath>
#include <vector>

#include "beamsched/presets.hpp"
#include "beamsched/scenario.hpp"
#include "beamsched/tec.hpp"

namespace testing {

// Scalar two-mode model written out by hand, independent of the library's
// matrix code: F = (1.1, 1.3), Q = (1, q_ct), H = 1, R = 2.
struct ScalarModel {
  double f[2] = {1.1, 1.3};
  double q[2] = {1.0, 4.0};
  double u0[2] = {0.9, 0.1};
  double u1[2] = {0.2, 0.8};
  double r = 2.0;
  double d = 1.0;
  double h = 0.0;

  static ScalarModel reckless(double q_ct) {
    ScalarModel m;
    m.q[1] = q_ct;
    return m;
  }
  static ScalarModel cautious(double q_ct) {
    ScalarModel m = reckless(q_ct);
    m.u0[0] = 0.95, m.u0[1] = 0.05;
    m.u1[0] = 0.6, m.u1[1] = 0.4;
    return m;
  }

  double passive(double p) const {
    double s = 0.0;
    for (int m = 0; m < 2; ++m) s += u0[m] * (f[m] * f[m] * p + q[m]);
    return s;
  }
  double active(double p) const {
    double s = 0.0;
    for (int m = 0; m < 2; ++m) {
      const double pred = f[m] * f[m] * p + q[m];
      s += u1[m] * pred * r / (pred + r);
    }
    return s;
  }
  double step(double p, int a) const { return a ? active(p) : passive(p); }
  double cost(double p, int a) const { return d * p + h * a; }

  // Discounted cost and work of the <first, z> policy over tau slots.
  void unroll(double p, double z, int first, double beta, int tau, double& cost_sum, double& work) const {
    cost_sum = 0.0;
    work = 0.0;
    double disc = 1.0;
    for (int t = 0; t < tau; ++t) {
      const int a = t == 0 ? first : (p > z ? 1 : 0);
      cost_sum += disc * cost(p, a);
      work += disc * a;
      p = step(p, a);
      disc *= beta;
    }
  }

  double mp(double p, double beta = 0.9, int tau = 100) const {
    double f0, g0, f1, g1;
    unroll(p, p, 0, beta, tau, f0, g0);
    unroll(p, p, 1, beta, tau, f1, g1);
    return (f0 - f1) / (g1 - g0);
  }
};

inline beamsched::TargetSpec reckless(double q_ct = 4.0, double d = 1.0) {
  return beamsched::scalar_target(beamsched::TargetType::reckless, q_ct, d);
}
inline beamsched::TargetSpec cautious(double q_ct = 4.0, double d = 1.0) {
  return beamsched::scalar_target(beamsched::TargetType::cautious, q_ct, d);
}

inline beamsched::ScenarioSpec scenario_of(std::vector<beamsched::TargetSpec> targets, int radars,
                                           int horizon = 100) {
  beamsched::ScenarioSpec s;
  s.targets = std::move(targets);
  s.radars = radars;
  s.horizon = horizon;
  s.relax_probability_order = true;
  return beamsched::validate(std::move(s));
}

inline bool symmetric(const beamsched::Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff() == 0.0; }

}  // namespace testing
