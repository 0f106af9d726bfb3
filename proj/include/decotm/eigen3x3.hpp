#pragma once

// Eigenvalues of small real nonsymmetric matrices.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace decotm {

using cd = std::complex<double>;

struct CubicEigenvalues {
  std::array<cd, 3> values;
  /// True when the characteristic cubic was too close to a repeated root and the
  /// values came from Hessenberg-QR on the matrix instead.
  bool used_fallback = false;
};

/// Roots of x^3 + a x^2 + b x + c with real coefficients (closed form).
std::array<cd, 3> solve_cubic(double a, double b, double c);

/// Discriminant of x^3 + a x^2 + b x + c, equal to prod_{i<j} (x_i - x_j)^2.
double cubic_discriminant(double a, double b, double c);

/// Eigenvalues via the characteristic cubic; Hessenberg-QR fallback near repeated roots.
CubicEigenvalues eigenvalues_3x3(const Eigen::Matrix3d& m);

}  // namespace decotm
