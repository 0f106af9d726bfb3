#pragma once

// Nearest-neighbour correlated noise with a separable kernel.
//
// With P(b, b') = sum_n p_n(b) p_n(b') the chain of intervals contracts into
// powers of a 3N x 3N matrix S indexed by (basis n, axis i):
//   S_(n i),(n' j) = int db p_n(b) T_ij(b) p_n'(b),
// where T(b) is the un-averaged single-interval map.
//
// Normalization convention: basis functions are rescaled by sqrt(V), V the support
// measure (2pi for the ring), so integrals are taken against the uniform stationary
// marginal. S is unchanged by this rescaling; the exit weights become
// w_n = sqrt(V) E[p_n] = (1, 0, 0) for the s/p mixture and the entry vector is
// e_(n j) = sqrt(V) E[p_n T_jk] s0_k.

#include <Eigen/Dense>

#include "decotm/noise.hpp"
#include "decotm/transfer.hpp"

namespace decotm {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

/// Un-averaged single-interval map for a fixed noise field.
TransferMatrix pointwise_transfer(const FieldVector& b, double B0, double tau);

struct SMatrix {
  MatX s;  // 3N x 3N, row/column index 3 n + i
  std::size_t n = 0;
  double B0 = 0.0;
  double tau = 0.0;

  double operator()(std::size_t n1, int i, std::size_t n2, int j) const {
    return s(static_cast<Eigen::Index>(3 * n1 + static_cast<std::size_t>(i)),
             static_cast<Eigen::Index>(3 * n2 + static_cast<std::size_t>(j)));
  }
};

class KernelNormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kKernelNormalizationTol = 1e-12;

/// Throws KernelNormalizationError if the rule does not normalize the kernel's marginal.
SMatrix build_s_matrix(const SeparableKernel& k, double B0, double tau, const QuadratureRule& quad);

struct BoundaryVectors {
  VecX entry;  // length 3N
  VecX exit;   // length N
};

BoundaryVectors boundary_vectors(const SeparableKernel& k, const BlochVector& s0, double B0, double tau,
                                 const QuadratureRule& quad);

class NoSurvivingModes : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultTransientCut = 0.5;
inline constexpr double kLabelWeight = 0.9;

/// Eigenvalues of S with |d| >= transient_cut mapped to rates; labels from the
/// eigenvector weight on the (n = 1, z) and (n = 1, x/y) components.
RelaxationReport asymptotic_rates(const SMatrix& s, double tau, double transient_cut = kDefaultTransientCut);

/// Largest |eigenvalue| of S.
double spectral_radius(const SMatrix& s);

BlochVector propagate_correlated(const SeparableKernel& k, const BlochVector& s0, int m, double B0, double tau,
                                 const QuadratureRule& quad);

}  // namespace decotm
