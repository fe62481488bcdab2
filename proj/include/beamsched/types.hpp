#pragma once

#include <Eigen/Dense>

namespace beamsched {

// Largest state dimension L supported. Matrices keep fixed-capacity storage so
// the per-slot Kalman recursion never touches the heap.
inline constexpr int kMaxStateDim = 8;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                             kMaxStateDim, kMaxStateDim>;

inline Matrix scalar_matrix(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

}  // namespace beamsched
