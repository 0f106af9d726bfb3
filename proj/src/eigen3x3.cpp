#include "decotm/eigen3x3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace decotm {

namespace {
// Fallback when |discriminant| < kIllConditioned * scale^6.
constexpr double kIllConditioned = 1e-10;
}  // namespace

double cubic_discriminant(double a, double b, double c) {
  return 18.0 * a * b * c - 4.0 * a * a * a * c + a * a * b * b - 4.0 * b * b * b - 27.0 * c * c;
}

std::array<cd, 3> solve_cubic(double a, double b, double c) {
  // x = t - a/3 gives t^3 + p t + q = 0.
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double h = q * q / 4.0 + p * p * p / 27.0;

  std::array<cd, 3> roots;
  if (h <= 0.0 && p < 0.0) {
    // Three real roots, trigonometric form.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots[static_cast<std::size_t>(k)] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift;
    }
  } else {
    // One real root and a conjugate pair; stable Cardano.
    const double sq = std::sqrt(std::max(h, 0.0));
    const double big = -std::copysign(std::cbrt(std::abs(q) / 2.0 + sq), q);
    const double small = big != 0.0 ? -p / (3.0 * big) : 0.0;
    const double re = -(big + small) / 2.0 - shift;
    const double im = std::sqrt(3.0) / 2.0 * (big - small);
    roots[0] = big + small - shift;
    roots[1] = cd(re, std::abs(im));
    roots[2] = cd(re, -std::abs(im));
  }
  return roots;
}

CubicEigenvalues eigenvalues_3x3(const Eigen::Matrix3d& m) {
  const double tr = m.trace();
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  const double det = m.determinant();
  const double a = -tr, b = minors, c = -det;

  CubicEigenvalues out;
  out.values = solve_cubic(a, b, c);

  double scale = 1.0;
  for (const auto& r : out.values) scale = std::max(scale, std::abs(r));
  const double disc = cubic_discriminant(a, b, c);
  if (std::abs(disc) < kIllConditioned * std::pow(scale, 6)) {
    Eigen::EigenSolver<Eigen::Matrix3d> es(m, false);
    const auto ev = es.eigenvalues();
    for (int k = 0; k < 3; ++k) out.values[static_cast<std::size_t>(k)] = ev[k];
    out.used_fallback = true;
  }
  return out;
}

}  // namespace decotm
