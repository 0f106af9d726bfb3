#pragma once

// Independent checks on the transfer-matrix solution: direct Monte Carlo over
// noise trajectories, second-order (Redfield) rates, and small-tau expansions.

#include <cstdint>

#include "decotm/noise.hpp"
#include "decotm/su2.hpp"
#include "decotm/transfer.hpp"

namespace decotm {

struct MonteCarloResult {
  BlochVector mean;
  Vec3 standard_error = Vec3::Zero();
  std::size_t trajectories = 0;
  std::uint64_t seed = 0;
};

/// Trajectories are accumulated in fixed blocks of this size and merged in block
/// order, so results are bit-identical for any worker count.
inline constexpr std::size_t kMonteCarloBlock = 256;

/// Average of R(b_m) ... R(b_1) s0 over i.i.d. fields; trajectory k uses substream(seed, k).
MonteCarloResult monte_carlo_white(const NoiseDistribution& dist, double B0, double tau, int m, const BlochVector& s0,
                                   std::size_t n_traj, std::uint64_t seed, int threads = 1);

/// Same, with b_1 from the kernel's marginal and b_{i+1} drawn conditionally on b_i.
MonteCarloResult monte_carlo_correlated(const SeparableKernel& kernel, double B0, double tau, int m,
                                        const BlochVector& s0, std::size_t n_traj, std::uint64_t seed,
                                        int threads = 1);

struct PerturbativeRates {
  double rate1 = 0.0;  // 1/T1 = k_xx(w0) + k_yy(w0)
  double rate2 = 0.0;  // 1/T2 = 1/(2 T1) + k_zz(0)
  double k_xx = 0.0;   // at w0 = 2 B0
  double k_yy = 0.0;
  double k_zz0 = 0.0;
};

/// k(w) = 2 int ds e^{-i w s} C(s) for a piecewise-constant field whose correlation,
/// averaged over the phase of the switching grid, is the triangle
/// C(s) = mean_sq (1 - |s|/tau) on |s| < tau. Closed form 2 mean_sq tau sinc^2(w tau / 2).
double piecewise_spectral_density(double mean_sq, double omega, double tau);

PerturbativeRates redfield_rates(const NoiseDistribution& dist, double B0, double tau);

struct SeriesRates {
  double rate1 = 0.0;
  double rate2 = 0.0;
};

/// Rates expanded through tau^3 in the moments (odd moments assumed zero).
SeriesRates series_rates(const MomentSet& mom, double B0, double tau);

struct EigenvalueExpansion {
  double dz = 1.0;
  cd d_plus;
  cd d_minus;
  bool overdamped = false;  // negative radicand: real pair
};

/// Leading small-tau eigenvalues: d_z ~ 1 - 2 tau^2 (bx2 + by2) and
/// d_xy ~ 1 - 2 tau^2 B0^2 - tau^2 (bx2 + by2 + 2 bz2) +- 2i sqrt(tau^2 B0^2 - tau^4 (bx2 - by2)^2 / 4).
EigenvalueExpansion eigenvalue_expansions(const MomentSet& mom, double B0, double tau);

}  // namespace decotm
