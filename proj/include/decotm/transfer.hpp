#pragma once

// Exact solution for piecewise-constant, interval-independent noise.
//
// For each interval of length tau the ensemble-averaged Heisenberg action on the
// Pauli vector is a real 3x3 matrix T built from seven averages (I0, I_i, I_ij)
// of the single-interval propagator. After m intervals the Bloch vector is T^m s0;
// the eigenvalues d_j of T give the relaxation rates -ln|d_j| / tau.

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "decotm/eigen3x3.hpp"
#include "decotm/noise.hpp"
#include "decotm/su2.hpp"

namespace decotm {

using Mat3c = Eigen::Matrix3cd;

/// Averages of cos^2(B tau), Bhat_i sin cos and Bhat_i Bhat_j sin^2 with B = B0 z + b.
struct IntegralSet {
  double i0 = 1.0;
  Vec3 i = Vec3::Zero();
  Mat3 ij = Mat3::Zero();
  double B0 = 0.0;
  double tau = 0.0;

  /// |I0 + tr(I_ij) - 1|; the integrand of this combination is identically one.
  double sum_rule_defect() const { return std::abs(i0 + ij.trace() - 1.0); }

  /// I_x, I_y and the off-diagonal I_ij all below tol.
  bool symmetric_case(double tol = 1e-12) const;
};

class SumRuleViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSumRuleTolerance = 1e-9;

/// Throws SumRuleViolation when the rule breaks the sum rule by more than kSumRuleTolerance.
IntegralSet compute_integrals(const QuadratureRule& quad, double B0, double tau);
IntegralSet compute_integrals(const NoiseDistribution& dist, double B0, double tau, const QuadratureRule& quad);

class TransferMatrix {
 public:
  TransferMatrix() : m_(Mat3::Identity()) {}
  explicit TransferMatrix(const Mat3& m) : m_(m) {}

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  BlochVector apply(const BlochVector& s) const { return BlochVector(m_ * s.vec()); }
  double max_singular_value() const;

 private:
  Mat3 m_;
};

TransferMatrix build_transfer_matrix(const IntegralSet& ints);

enum class SpectrumKind { ThreeReal, RealPlusPair };

class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// T = V D V^-1. `values[0]` is the longitudinal (z-like) eigenvalue; in the
/// complex case `values[1]` has positive imaginary part and `values[2]` is its conjugate.
struct Spectrum {
  std::array<cd, 3> values{};
  Mat3c right;  // columns: right eigenvectors (R^-1)
  Mat3c left;   // rows: R, so that R T R^-1 = D
  SpectrumKind kind = SpectrumKind::ThreeReal;
  Mat3 t = Mat3::Identity();
  bool used_fallback = false;
};

/// |Im d| below this times max(1, |d|) counts as real.
inline constexpr double kRealThreshold = 1e-10;

/// Throws DegenerateSpectrum when T is not diagonalizable within tolerance.
Spectrum spectral_decompose(const TransferMatrix& t);

enum class DampingClass { Underdamped, Overdamped, Boundary };

std::string to_string(DampingClass c);

enum class ModeLabel { Longitudinal, Transverse, Transient, Ambiguous };

std::string to_string(ModeLabel l);

struct RelaxationMode {
  cd eigenvalue;
  double rate = 0.0;          // -ln|d| / tau
  bool non_decaying = false;  // |d| >= 1, rate clamped to 0
  bool capped = false;        // |d| == 0, rate set to the cap
  ModeLabel label = ModeLabel::Transient;
};

struct RelaxationReport {
  std::vector<RelaxationMode> modes;
  double omega = 0.0;  // precession angular frequency phi / tau
  DampingClass damping = DampingClass::Underdamped;
  Eigen::MatrixXcd right;  // eigenvectors for preparation / measurement
  std::vector<std::string> warnings;

  /// Rate of the first mode labelled Longitudinal (1/T1); NaN if none.
  double longitudinal_rate() const;
  /// Rate of the first mode labelled Transverse (1/T2); NaN if none.
  double transverse_rate() const;
};

/// -ln|d| / tau with the clamps described in RelaxationMode.
RelaxationMode decay_mode(cd d, double tau);

RelaxationReport relaxation_report(const Spectrum& spec, double tau);

/// R^-1 D^m R s0.
BlochVector propagate(const Spectrum& spec, const BlochVector& s0, int m);
/// Spectral form when T is diagonalizable, repeated multiplication otherwise.
BlochVector propagate(const TransferMatrix& t, const BlochVector& s0, int m);
/// T (T (... T s0)).
BlochVector propagate_direct(const TransferMatrix& t, const BlochVector& s0, int m);

/// 4 I_z^2 - (I_xx - I_yy)^2.
double damping_discriminant(const IntegralSet& ints);

/// Symmetric case: sign of damping_discriminant (|disc| <= 1e-12 is the boundary).
/// Otherwise classified from the eigenvalues of T.
DampingClass classify_damping(const IntegralSet& ints);

}  // namespace decotm
