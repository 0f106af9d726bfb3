#include "decotm/su2.hpp"

#include <cmath>

#include "decotm/detail/assemble.hpp"

namespace decotm {

namespace {
constexpr double kSeriesSwitch = 1e-6;
const std::complex<double> kI{0.0, 1.0};
}  // namespace

bool FieldVector::finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

Su2Params su2_params(const FieldVector& field, double duration) {
  const Vec3 x = field.vec();
  const double b = x.norm();
  const double theta = b * duration;
  Su2Params p;
  p.c = std::cos(theta);
  if (theta < kSeriesSwitch) {
    // sin(Bt)/B = t (1 - (Bt)^2/6 + ...)
    p.s = x * (duration * (1.0 - theta * theta / 6.0));
  } else {
    p.s = x * (std::sin(theta) / b);
  }
  return p;
}

Mat2c su2_unitary(const FieldVector& field, double duration) {
  const Su2Params p = su2_params(field, duration);
  const auto& sig = pauli();
  Mat2c u = p.c * Mat2c::Identity();
  for (int k = 0; k < 3; ++k) u += kI * p.s[k] * sig[k];
  return u;
}

double Rotation3::orthogonality_defect() const {
  return (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Mat3 rotation_from_params(const Su2Params& p) {
  const Vec3 linear = p.c * p.s;
  const Mat3 quadratic = p.s * p.s.transpose();
  return detail::assemble_transfer(p.c * p.c, linear, quadratic);
}

Rotation3 adjoint_rotation(const FieldVector& field, double duration) {
  return Rotation3(rotation_from_params(su2_params(field, duration)));
}

const std::array<Mat2c, 3>& pauli() {
  static const std::array<Mat2c, 3> sig = [] {
    std::array<Mat2c, 3> out;
    out[0] << 0, 1, 1, 0;
    out[1] << 0, -kI, kI, 0;
    out[2] << 1, 0, 0, -1;
    return out;
  }();
  return sig;
}

Mat2c density_from_bloch(const BlochVector& s) {
  const auto& sig = pauli();
  Mat2c rho = Mat2c::Identity();
  for (int k = 0; k < 3; ++k) rho += s[k] * sig[k];
  return 0.5 * rho;
}

BlochVector bloch_from_density(const Mat2c& rho) {
  const auto& sig = pauli();
  Vec3 v;
  for (int k = 0; k < 3; ++k) v[k] = (rho * sig[k]).trace().real();
  return BlochVector(v);
}

BlochVector bloch_roundtrip(const BlochVector& s) {
  if (!(s.norm() <= 1.0 + kBlochSlack)) {
    throw UnphysicalState("Bloch vector norm exceeds 1: " + std::to_string(s.norm()));
  }
  return bloch_from_density(density_from_bloch(s));
}

}  // namespace decotm
