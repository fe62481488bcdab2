#pragma once

#include "beamsched/scenario.hpp"
#include "beamsched/types.hpp"

namespace beamsched {

/// Tracking-error covariance of one target; a 1x1 matrix holds the scalar
/// variance.
class TecState {
 public:
  TecState() = default;
  explicit TecState(Matrix p) : p_(std::move(p)) {}
  static TecState scalar(double v) { return TecState(scalar_matrix(v)); }

  const Matrix& matrix() const { return p_; }
  int dim() const { return static_cast<int>(p_.rows()); }
  double trace() const { return p_.trace(); }
  /// tr(P)/L, the quantity threshold policies compare against.
  double level() const { return p_.trace() / static_cast<double>(p_.rows()); }
  double value() const { return p_(0, 0); }

  friend bool operator==(const TecState& a, const TecState& b) {
    return a.p_.rows() == b.p_.rows() && a.p_.cols() == b.p_.cols() && (a.p_.array() == b.p_.array()).all();
  }

 private:
  Matrix p_;
};

/// Pbar = F P F' + Q.
TecState predict(const TecState& p, const DynamicsMode& mode);

/// K = Pbar H' (H Pbar H' + R)^-1. Throws NumericalError when the innovation
/// covariance cannot be factored.
Matrix kalman_gain(const TecState& predicted, const MeasurementModel& meas);

/// Phat = (I - K H) Pbar, then symmetrized.
TecState update(const TecState& predicted, const MeasurementModel& meas);

/// Mode-weighted posterior after a tracked slot.
TecState phi_active(const TecState& p, const TargetSpec& target);

/// Mode-weighted prediction after an untracked slot.
TecState phi_passive(const TecState& p, const TargetSpec& target);

inline TecState phi(const TecState& p, int action, const TargetSpec& target) {
  return action ? phi_active(p, target) : phi_passive(p, target);
}

/// d tr(P)/L + h a.
double cost(const TecState& p, int action, const TargetSpec& target);

inline constexpr double kEigenvalueFloor = 1e-12;

/// Throws NumericalError if P is not symmetric positive definite above the
/// eigenvalue floor.
void ensure_positive_definite(const TecState& p);

}  // namespace beamsched
