#include "beamsched/scenario.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace beamsched {

ConfigError::ConfigError(std::vector<Violation> violations)
    : Error(ErrorCode::config, "invalid scenario:\n" + format_violations(violations)),
      violations_(std::move(violations)) {}

ConfigError::ConfigError(const std::string& message)
    : Error(ErrorCode::config, message), violations_{{"", message}} {}

IndexAnomaly::IndexAnomaly(double state, double threshold, double marginal_work)
    : Error(ErrorCode::index_anomaly,
            [&] {
              std::ostringstream os;
              os.precision(17);
              os << "marginal work g = " << marginal_work << " <= 0 at state " << state
                 << ", threshold " << threshold;
              return os.str();
            }()),
      state_(state),
      threshold_(threshold),
      marginal_work_(marginal_work) {}

std::string format_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    out += "  ";
    out += v.path.empty() ? "<root>" : v.path;
    out += ": ";
    out += v.rule;
    out += '\n';
  }
  return out;
}

bool ScenarioSpec::all_scalar() const {
  for (const auto& t : targets)
    if (!t.is_scalar()) return false;
  return !targets.empty();
}

Matrix cv_matrix(double sample_time) {
  Matrix f = Matrix::Identity(4, 4);
  f(0, 1) = sample_time;
  f(2, 3) = sample_time;
  return f;
}

Matrix ct_matrix(double omega, double sample_time) {
  if (omega == 0.0) throw ConfigError("ct_matrix: turn rate must be non-zero (use cv_matrix)");
  const double s = std::sin(omega * sample_time);
  const double c = std::cos(omega * sample_time);
  Matrix f = Matrix::Zero(4, 4);
  f(0, 0) = 1.0;
  f(0, 1) = s / omega;
  f(0, 3) = (c - 1.0) / omega;
  f(1, 1) = c;
  f(1, 3) = s;
  f(2, 1) = (1.0 - c) / omega;
  f(2, 2) = 1.0;
  f(2, 3) = s / omega;
  f(3, 1) = -s;
  f(3, 3) = c;
  return f;
}

Matrix process_noise(double amplitude, double sample_time) {
  const double t = sample_time;
  Matrix q = Matrix::Zero(4, 4);
  for (int b = 0; b < 2; ++b) {
    const int o = 2 * b;
    q(o, o) = amplitude * t * t * t / 3.0;
    q(o, o + 1) = amplitude * t * t / 2.0;
    q(o + 1, o) = amplitude * t * t / 2.0;
    q(o + 1, o + 1) = amplitude * t;
  }
  return q;
}

Matrix position_measurement() {
  Matrix h = Matrix::Zero(2, 4);
  h(0, 0) = 1.0;
  h(1, 2) = 1.0;
  return h;
}

namespace {

bool is_symmetric(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() >= -1e-12;
}

bool is_pd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

class Collector {
 public:
  void add(std::string path, std::string rule) { out_.push_back({std::move(path), std::move(rule)}); }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

void check_probabilities(const std::vector<double>& u, std::size_t modes, const std::string& path,
                         Collector& c) {
  if (u.size() != modes) {
    c.add(path, "length " + std::to_string(u.size()) + " != mode count " + std::to_string(modes));
    return;
  }
  for (std::size_t m = 0; m < u.size(); ++m)
    if (!(u[m] >= 0.0) || !std::isfinite(u[m]))
      c.add(path + "[" + std::to_string(m) + "]", "probability must be finite and nonnegative");
  const double sum = std::accumulate(u.begin(), u.end(), 0.0);
  if (!(std::abs(sum - 1.0) <= kProbabilitySumTolerance)) c.add(path, "probability sum != 1");
}

void check_target(const TargetSpec& t, const std::string& p, bool relax_order, Collector& c) {
  if (t.modes.empty()) {
    c.add(p + ".modes", "at least one dynamics mode required");
    return;
  }
  const int L = t.dim();
  if (L < 1 || L > kMaxStateDim) {
    c.add(p + ".modes[0].F", "state dimension must be in [1, " + std::to_string(kMaxStateDim) + "]");
    return;
  }
  for (std::size_t m = 0; m < t.modes.size(); ++m) {
    const auto& mode = t.modes[m];
    const std::string mp = p + ".modes[" + std::to_string(m) + "]";
    if (mode.transition.rows() != L || mode.transition.cols() != L)
      c.add(mp + ".F", "must be " + std::to_string(L) + "x" + std::to_string(L));
    if (!mode.transition.allFinite()) c.add(mp + ".F", "entries must be finite");
    if (mode.noise.rows() != L || mode.noise.cols() != L) {
      c.add(mp + ".Q", "must be " + std::to_string(L) + "x" + std::to_string(L));
    } else {
      if (!is_symmetric(mode.noise, 0.0)) c.add(mp + ".Q", "must be exactly symmetric");
      else if (!is_psd(mode.noise)) c.add(mp + ".Q", "must be positive semidefinite");
    }
    if (!(mode.amplitude > 0.0)) c.add(mp + ".q", "amplitude must be > 0");
    if (m > 0 && !(t.modes[m - 1].amplitude < mode.amplitude))
      c.add(mp + ".q", "amplitudes must be strictly increasing in mode index");
  }

  const std::size_t M = t.modes.size();
  check_probabilities(t.probs.passive, M, p + ".U.u0", c);
  check_probabilities(t.probs.active, M, p + ".U.u1", c);
  if (!relax_order && M >= 2 && t.probs.passive.size() == M && t.probs.active.size() == M) {
    for (std::size_t m = 1; m < M; ++m) {
      if (!(t.probs.passive[0] > t.probs.passive[m])) {
        c.add(p + ".U.u0", "u0[1] not strictly largest");
        break;
      }
    }
    for (std::size_t m = 1; m < M; ++m) {
      if (!(t.probs.active[0] < t.probs.active[m])) {
        c.add(p + ".U.u1", "u1[1] not strictly smallest");
        break;
      }
    }
  }

  const auto& H = t.meas.H;
  const auto& R = t.meas.R;
  if (H.cols() != L || H.rows() < 1) c.add(p + ".H", "must have " + std::to_string(L) + " columns");
  if (R.rows() != H.rows() || R.cols() != H.rows()) {
    c.add(p + ".R", "must be square with side equal to rows(H)");
  } else if (!is_symmetric(R, 1e-12) || !is_pd(R)) {
    c.add(p + ".R", "must be symmetric positive definite");
  }

  if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) c.add(p + ".d", "weight must be finite and >= 0");
  if (!(t.measurement_cost >= 0.0) || !std::isfinite(t.measurement_cost))
    c.add(p + ".h", "measurement cost must be finite and >= 0");

  std::visit(
      [&](const auto& rule) {
        using R0 = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R0, FixedInitial>) {
          if (rule.P.rows() != L || rule.P.cols() != L)
            c.add(p + ".P0", "must be " + std::to_string(L) + "x" + std::to_string(L));
          else if (!is_symmetric(rule.P, 1e-10) || !is_pd(rule.P))
            c.add(p + ".P0", "must be symmetric positive definite");
        } else if constexpr (std::is_same_v<R0, UniformScalarInitial>) {
          if (L != 1) c.add(p + ".P0_rule", "uniform_scalar requires a scalar target");
          if (!(rule.lo >= 0.0 && rule.lo < rule.hi))
            c.add(p + ".P0_rule", "uniform_scalar needs 0 <= lo < hi");
        } else {
          if (rule.dim != L) c.add(p + ".P0_rule", "gram_uniform01 dimension must equal L");
        }
      },
      t.initial);
}

}  // namespace

std::vector<Violation> find_violations(const ScenarioSpec& spec) {
  Collector c;
  const int N = spec.target_count();
  if (N < 2) c.add("targets", "at least two targets required");
  if (!(spec.radars >= 1 && spec.radars < N)) c.add("K", "must satisfy 1 <= K < N");
  if (!(spec.discount > 0.0 && spec.discount < 1.0)) c.add("beta", "must lie in (0, 1)");
  if (spec.horizon < 1) c.add("horizon", "must be >= 1");
  if (spec.truncation < 1) c.add("tau", "must be >= 1");
  for (int n = 0; n < N; ++n)
    check_target(spec.targets[n], "targets[" + std::to_string(n) + "]", spec.relax_probability_order, c);
  return c.take();
}

ScenarioSpec validate(ScenarioSpec spec) {
  auto violations = find_violations(spec);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  for (auto& t : spec.targets) {
    for (auto* u : {&t.probs.passive, &t.probs.active}) {
      const double sum = std::accumulate(u->begin(), u->end(), 0.0);
      // Renormalized sums land within a few ulps of 1, so a second pass is a no-op.
      if (std::abs(sum - 1.0) > 1e-14)
        for (auto& x : *u) x /= sum;
    }
  }
  return spec;
}

}  // namespace beamsched
