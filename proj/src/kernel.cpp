#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "decotm/noise.hpp"

namespace decotm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SeparableKernel::SeparableKernel(double b0, double r) : b0_(b0), r_(r) {
  const double s = std::sqrt(1.0 / kTwoPi);
  const double p = std::sqrt(r / kTwoPi);
  basis_.push_back([s](const FieldVector&) { return s; });
  basis_.push_back([p](const FieldVector& b) { return p * std::cos(azimuth(b)); });
  basis_.push_back([p](const FieldVector& b) { return p * std::sin(azimuth(b)); });

  // CDF of the step delta in [0, 2pi): F(delta) = (delta + r sin delta) / 2pi.
  auto cdf = std::make_shared<std::vector<double>>(kStepCdfPoints + 1);
  for (int i = 0; i <= kStepCdfPoints; ++i) {
    const double delta = kTwoPi * i / kStepCdfPoints;
    (*cdf)[static_cast<std::size_t>(i)] = (delta + r * std::sin(delta)) / kTwoPi;
  }
  cdf->back() = 1.0;
  step_cdf_ = std::move(cdf);
}

SeparableKernel SeparableKernel::sp_wave_mixture(double b0, double r) {
  if (!(std::isfinite(b0) && b0 >= 0.0)) throw std::invalid_argument("sp_wave: b0 must be >= 0");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("sp_wave: r must lie in [0, 1]");
  return SeparableKernel(b0, r);
}

double SeparableKernel::support_measure() const { return kTwoPi; }

double SeparableKernel::density(const FieldVector& b, const FieldVector& bp) const {
  double sum = 0.0;
  for (const auto& p : basis_) sum += p(b) * p(bp);
  return sum;
}

NoiseDistribution kernel_marginal(const SeparableKernel& k) {
  // The p-wave terms integrate to zero over phi'; the marginal is uniform on the ring.
  return k.support();
}

std::vector<BasisFunction> kernel_basis(const SeparableKernel& k) { return k.basis(); }

double marginal_normalization_defect(const SeparableKernel& k, const QuadratureRule& rule) {
  const double measure = k.support_measure();
  double worst = 0.0;
  for (const auto& a : rule.nodes) {
    double integral = 0.0;
    for (const auto& n : rule.nodes) integral += n.weight * k.density(a.field, n.field);
    worst = std::max(worst, std::abs(measure * integral - 1.0));
  }
  return worst;
}

FieldVector conditional_sample(const SeparableKernel& k, const FieldVector& prev, RandomStream& stream) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(stream);
  const auto& cdf = k.step_cdf();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, kStepCdfPoints));
  const std::size_t lo = hi - 1;
  const double span = cdf[hi] - cdf[lo];
  const double frac = span > 0.0 ? (u - cdf[lo]) / span : 0.0;
  const double delta = kTwoPi * (static_cast<double>(lo) + frac) / kStepCdfPoints;
  const double phi = azimuth(prev) + delta;
  return FieldVector(k.b0() * std::cos(phi), k.b0() * std::sin(phi), 0.0);
}

}  // namespace decotm
