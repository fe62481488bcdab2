#include "beamsched/tec.hpp"

#include <cmath>
#include <sstream>

namespace beamsched {

TecState predict(const TecState& p, const DynamicsMode& mode) {
  const auto& f = mode.transition;
  const Matrix pbar = f * p.matrix() * f.transpose() + mode.noise;
  return TecState((pbar + pbar.transpose()) * 0.5);
}

Matrix kalman_gain(const TecState& predicted, const MeasurementModel& meas) {
  const Matrix& pbar = predicted.matrix();
  const Matrix pht = pbar * meas.H.transpose();
  const Matrix innovation = meas.H * pht + meas.R;
  if (innovation.rows() == 1) {
    const double s = innovation(0, 0);
    if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("singular innovation covariance");
    return pht / s;
  }
  Eigen::LDLT<Matrix> ldlt(innovation);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0)
    throw NumericalError("singular innovation covariance");
  // K' = S^-1 (P H')'
  return ldlt.solve(pht.transpose()).transpose();
}

TecState update(const TecState& predicted, const MeasurementModel& meas) {
  const Matrix& pbar = predicted.matrix();
  const Matrix gain = kalman_gain(predicted, meas);
  const int L = static_cast<int>(pbar.rows());
  Matrix post = (Matrix::Identity(L, L) - gain * meas.H) * pbar;
  return TecState((post + post.transpose()) * 0.5);
}

TecState phi_active(const TecState& p, const TargetSpec& target) {
  const int L = p.dim();
  Matrix acc = Matrix::Zero(L, L);
  for (std::size_t m = 0; m < target.modes.size(); ++m) {
    const double w = target.probs.active[m];
    if (w == 0.0) continue;
    acc += w * update(predict(p, target.modes[m]), target.meas).matrix();
  }
  return TecState(std::move(acc));
}

TecState phi_passive(const TecState& p, const TargetSpec& target) {
  const int L = p.dim();
  Matrix acc = Matrix::Zero(L, L);
  for (std::size_t m = 0; m < target.modes.size(); ++m) {
    const double w = target.probs.passive[m];
    if (w == 0.0) continue;
    acc += w * predict(p, target.modes[m]).matrix();
  }
  return TecState(std::move(acc));
}

double cost(const TecState& p, int action, const TargetSpec& target) {
  return target.weight * p.level() + target.measurement_cost * action;
}

void ensure_positive_definite(const TecState& p) {
  const Matrix& m = p.matrix();
  bool ok;
  if (m.rows() == 1) {
    ok = m(0, 0) > kEigenvalueFloor;
  } else if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    ok = false;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    ok = es.info() == Eigen::Success && es.eigenvalues().minCoeff() > kEigenvalueFloor;
  }
  if (!ok) {
    std::ostringstream os;
    os.precision(17);
    os << "TEC state lost positive definiteness (floor " << kEigenvalueFloor << "):\n" << m;
    throw NumericalError(os.str());
  }
}

}  // namespace beamsched
