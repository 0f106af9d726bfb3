#include <cmath>
#include <stdexcept>
#include <vector>

#include "decotm/correlated.hpp"
#include "decotm/oracles.hpp"
#include "decotm/parallel.hpp"

namespace decotm {

namespace {

struct BlockSums {
  Vec3 shifted = Vec3::Zero();  // sum of (x - x0)
  Vec3 squares = Vec3::Zero();  // sum of (x - x0)^2
};

// Runs trajectory(k) for every k and averages. Deviations are taken from
// trajectory 0, so a zero-variance ensemble reproduces it exactly.
template <class Trajectory>
MonteCarloResult run_ensemble(std::size_t n_traj, std::uint64_t seed, int threads, Trajectory&& trajectory) {
  if (n_traj < 1) throw std::invalid_argument("monte carlo: need at least one trajectory");
  const Vec3 x0 = trajectory(std::size_t{0});
  const std::size_t n_blocks = (n_traj + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<BlockSums> blocks(n_blocks);
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    BlockSums sums;
    const std::size_t end = std::min(n_traj, (b + 1) * kMonteCarloBlock);
    for (std::size_t k = b * kMonteCarloBlock; k < end; ++k) {
      const Vec3 d = (k == 0 ? x0 : trajectory(k)) - x0;
      sums.shifted += d;
      sums.squares += d.cwiseProduct(d);
    }
    blocks[b] = sums;
  });
  BlockSums total;
  for (const auto& b : blocks) {
    total.shifted += b.shifted;
    total.squares += b.squares;
  }
  const double n = static_cast<double>(n_traj);
  MonteCarloResult out;
  out.trajectories = n_traj;
  out.seed = seed;
  const Vec3 mean_shift = total.shifted / n;
  out.mean = BlochVector(Vec3(x0 + mean_shift));
  if (n_traj > 1) {
    for (int i = 0; i < 3; ++i) {
      const double var = std::max(0.0, (total.squares[i] - n * mean_shift[i] * mean_shift[i]) / (n - 1.0));
      out.standard_error[i] = std::sqrt(var / n);
    }
  }
  return out;
}

}  // namespace

MonteCarloResult monte_carlo_white(const NoiseDistribution& dist, double B0, double tau, int m, const BlochVector& s0,
                                   std::size_t n_traj, std::uint64_t seed, int threads) {
  if (m < 0) throw std::invalid_argument("monte_carlo_white: m must be >= 0");
  return run_ensemble(n_traj, seed, threads, [&](std::size_t k) {
    RandomStream stream = substream(seed, k);
    Vec3 s = s0.vec();
    for (int step = 0; step < m; ++step) {
      const FieldVector b = sample(dist, stream);
      s = adjoint_rotation(FieldVector(b.x, b.y, b.z + B0), tau).matrix() * s;
    }
    return s;
  });
}

MonteCarloResult monte_carlo_correlated(const SeparableKernel& kernel, double B0, double tau, int m,
                                        const BlochVector& s0, std::size_t n_traj, std::uint64_t seed,
                                        int threads) {
  if (m < 0) throw std::invalid_argument("monte_carlo_correlated: m must be >= 0");
  const NoiseDistribution marginal = kernel_marginal(kernel);
  return run_ensemble(n_traj, seed, threads, [&](std::size_t k) {
    RandomStream stream = substream(seed, k);
    Vec3 s = s0.vec();
    FieldVector b;
    for (int step = 0; step < m; ++step) {
      b = step == 0 ? sample(marginal, stream) : conditional_sample(kernel, b, stream);
      s = pointwise_transfer(b, B0, tau).matrix() * s;
    }
    return s;
  });
}

}  // namespace decotm
