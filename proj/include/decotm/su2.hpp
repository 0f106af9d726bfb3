#pragma once

// Exact SU(2) exponentials and their action on the Bloch vector.
//
// Conventions: hbar = 1, H = -B.sigma, U = exp(-i H t) = cos(Bt) + i Bhat.sigma sin(Bt).
// The Heisenberg action U^+ sigma_i U = sum_j R_ij sigma_j defines the rotation R;
// a Bloch vector s evolves as s -> R s.  For B = B0 z the xy entry is +sin(2 B0 t).

#include <array>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace decotm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2c = Eigen::Matrix2cd;

/// A field in angular-frequency units (the level splitting of B0 z is 2 B0).
struct FieldVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr FieldVector() = default;
  constexpr FieldVector(double bx, double by, double bz) : x(bx), y(by), z(bz) {}
  explicit FieldVector(const Vec3& v) : x(v.x()), y(v.y()), z(v.z()) {}

  Vec3 vec() const { return {x, y, z}; }
  double norm() const { return vec().norm(); }
  bool finite() const;

  friend FieldVector operator+(const FieldVector& a, const FieldVector& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend FieldVector operator*(double k, const FieldVector& a) { return {k * a.x, k * a.y, k * a.z}; }
  friend bool operator==(const FieldVector&, const FieldVector&) = default;
};

/// Pauli expectation values (<sx>, <sy>, <sz>).
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr BlochVector() = default;
  constexpr BlochVector(double sx, double sy, double sz) : x(sx), y(sy), z(sz) {}
  explicit BlochVector(const Vec3& v) : x(v.x()), y(v.y()), z(v.z()) {}

  Vec3 vec() const { return {x, y, z}; }
  double norm() const { return vec().norm(); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// Slack allowed on |s| <= 1 before a state is rejected as unphysical.
inline constexpr double kBlochSlack = 1e-9;

class UnphysicalState : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// cos(Bt) and Bhat sin(Bt).
struct Su2Params {
  double c = 1.0;
  Vec3 s = Vec3::Zero();
};

/// Parameters of exp(i X.sigma t). Exact at X = 0; small Bt uses the series of sin(Bt)/B.
Su2Params su2_params(const FieldVector& field, double duration);

/// The 2x2 unitary exp(-i H t) with H = -field.sigma.
Mat2c su2_unitary(const FieldVector& field, double duration);

/// Proper rotation acting on Bloch vectors, R^T R = 1, det R = +1.
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m) : m_(m) {}

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  Vec3 apply(const Vec3& v) const { return m_ * v; }
  BlochVector apply(const BlochVector& s) const { return BlochVector(m_ * s.vec()); }

  /// Largest entry of |R^T R - 1|.
  double orthogonality_defect() const;

 private:
  Mat3 m_;
};

/// Adjoint action of U = exp(-i H t) on the Pauli basis.
Rotation3 adjoint_rotation(const FieldVector& field, double duration);

/// Adjoint action assembled from precomputed (c, s); shares the arithmetic of the transfer table.
Mat3 rotation_from_params(const Su2Params& p);

Mat2c density_from_bloch(const BlochVector& s);
BlochVector bloch_from_density(const Mat2c& rho);

/// density_from_bloch followed by bloch_from_density; rejects |s| > 1 + kBlochSlack.
BlochVector bloch_roundtrip(const BlochVector& s);

/// Pauli matrices sigma_x, sigma_y, sigma_z.
const std::array<Mat2c, 3>& pauli();

}  // namespace decotm
