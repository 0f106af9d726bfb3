#pragma once

// Noise laws P(b) for the per-interval random field, their moments,
// quadrature rules for ensemble averages, and samplers.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "decotm/su2.hpp"

namespace decotm {

using RandomStream = std::mt19937_64;

/// Independent stream for (master seed, index); the same pair always yields the same stream.
RandomStream substream(std::uint64_t master_seed, std::uint64_t index);

/// |b| = b0, b_z = 0, azimuth uniform.
struct PlanarRing {
  double b0 = 0.0;
};

/// |b| = b0, direction uniform on the sphere.
struct SphereShell {
  double b0 = 0.0;
};

/// b = a (cos phi, lambda sin phi, 0) with phi uniform and a fixed so that
/// mean(bx^2) + mean(by^2) = b0^2.
struct PlanarAnisotropic {
  double b0 = 0.0;
  double lambda = 1.0;
};

/// b = (+-bx, +-by, +-bz) with independent equiprobable signs.
struct AxisFlip {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;
};

struct PointField {
  FieldVector b;
};

struct Discrete {
  std::vector<FieldVector> atoms;
  std::vector<double> weights;
};

class NoiseDistribution {
 public:
  using Law = std::variant<PlanarRing, SphereShell, PlanarAnisotropic, AxisFlip, PointField, Discrete>;

  /// Throws std::invalid_argument on negative magnitudes, bad weights or non-finite input.
  explicit NoiseDistribution(Law law);

  static NoiseDistribution planar_ring(double b0) { return NoiseDistribution(PlanarRing{b0}); }
  static NoiseDistribution sphere_shell(double b0) { return NoiseDistribution(SphereShell{b0}); }
  static NoiseDistribution planar_anisotropic(double b0, double lambda) {
    return NoiseDistribution(PlanarAnisotropic{b0, lambda});
  }
  static NoiseDistribution axis_flip(double bx, double by, double bz) {
    return NoiseDistribution(AxisFlip{bx, by, bz});
  }
  static NoiseDistribution point(const FieldVector& b) { return NoiseDistribution(PointField{b}); }
  static NoiseDistribution discrete(std::vector<FieldVector> atoms, std::vector<double> weights) {
    return NoiseDistribution(Discrete{std::move(atoms), std::move(weights)});
  }

  const Law& law() const { return law_; }
  /// Family tag as used in configs and CSV output ("planar_ring", ...).
  std::string family() const;

  template <class F>
  bool holds() const {
    return std::holds_alternative<F>(law_);
  }

 private:
  Law law_;
};

/// Even moments up to fourth order. Odd moments of the built-in families vanish.
struct MomentSet {
  Vec3 second = Vec3::Zero();  // mean(bx^2), mean(by^2), mean(bz^2)
  Vec3 fourth = Vec3::Zero();  // mean(bx^4), mean(by^4), mean(bz^4)
  double xy = 0.0;             // mean(bx^2 by^2)
  double xz = 0.0;
  double yz = 0.0;

  double total_second() const { return second.sum(); }
  double planar_second() const { return second[0] + second[1]; }
};

MomentSet moments(const NoiseDistribution& dist);

struct QuadratureNode {
  FieldVector field;
  double weight = 0.0;
};

/// Nonnegative weights summing to one; integrates P(b) d^3b.
struct QuadratureRule {
  std::vector<QuadratureNode> nodes;
  int order = 0;

  double weight_sum() const;
};

inline constexpr int kDefaultQuadratureOrder = 64;

/// Planar families: `order` equally weighted azimuth nodes. Sphere: order/2 Gauss-Legendre
/// nodes in cos(theta) times `order` azimuth nodes. Atomic families: the atoms.
QuadratureRule quadrature(const NoiseDistribution& dist, int order = kDefaultQuadratureOrder);

/// Moments of the discrete measure defined by a rule.
MomentSet quadrature_moments(const QuadratureRule& rule);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

FieldVector sample(const NoiseDistribution& dist, RandomStream& stream);

// ---------------------------------------------------------------------------
// Correlated (nearest-neighbour) noise with a separable kernel
// P(b, b') = sum_n p_n(b) p_n(b').

using BasisFunction = std::function<double(const FieldVector&)>;

/// s/p-wave mixture on the ring |b| = b0, b_z = 0:
/// P(phi, phi') = (1 + r cos(phi - phi')) / 2pi, 0 <= r <= 1, measure d phi.
class SeparableKernel {
 public:
  static SeparableKernel sp_wave_mixture(double b0, double r);

  double b0() const { return b0_; }
  double r() const { return r_; }
  std::string family() const { return "sp_wave"; }

  /// Number of basis functions N (3 for the s/p mixture, zero functions kept at r = 0).
  std::size_t size() const { return basis_.size(); }
  const std::vector<BasisFunction>& basis() const { return basis_; }

  /// Total measure of the support in the basis' native measure (2pi for the azimuth).
  double support_measure() const;

  /// Uniform law on the support; quadrature over the support is taken from it.
  NoiseDistribution support() const { return NoiseDistribution::planar_ring(b0_); }

  /// sum_n p_n(b) p_n(b').
  double density(const FieldVector& b, const FieldVector& bp) const;

  /// Inverse CDF of the angle step delta = phi - phi_prev, tabulated on a uniform grid.
  const std::vector<double>& step_cdf() const { return *step_cdf_; }

 private:
  SeparableKernel(double b0, double r);

  double b0_ = 0.0;
  double r_ = 0.0;
  std::vector<BasisFunction> basis_;
  std::shared_ptr<const std::vector<double>> step_cdf_;
};

inline constexpr int kStepCdfPoints = 4096;

NoiseDistribution kernel_marginal(const SeparableKernel& k);
std::vector<BasisFunction> kernel_basis(const SeparableKernel& k);

/// Largest |int P(b_a, b') db' - 1| over the nodes b_a of the rule.
double marginal_normalization_defect(const SeparableKernel& k, const QuadratureRule& rule);

/// Draw b' from P(prev, .) / normalization.
FieldVector conditional_sample(const SeparableKernel& k, const FieldVector& prev, RandomStream& stream);

/// Azimuth of a field in [0, 2pi).
double azimuth(const FieldVector& b);

}  // namespace decotm
