#include <cmath>

#include "decotm/oracles.hpp"

namespace decotm {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

double piecewise_spectral_density(double mean_sq, double omega, double tau) {
  const double sc = sinc(0.5 * omega * tau);
  return 2.0 * mean_sq * tau * sc * sc;
}

PerturbativeRates redfield_rates(const NoiseDistribution& dist, double B0, double tau) {
  const MomentSet mom = moments(dist);
  const double w0 = 2.0 * B0;
  PerturbativeRates out;
  out.k_xx = piecewise_spectral_density(mom.second[0], w0, tau);
  out.k_yy = piecewise_spectral_density(mom.second[1], w0, tau);
  out.k_zz0 = piecewise_spectral_density(mom.second[2], 0.0, tau);
  out.rate1 = out.k_xx + out.k_yy;
  out.rate2 = 0.5 * out.rate1 + out.k_zz0;
  return out;
}

SeriesRates series_rates(const MomentSet& mom, double B0, double tau) {
  const double bx2 = mom.second[0], by2 = mom.second[1], bz2 = mom.second[2];
  const double bx4 = mom.fourth[0], by4 = mom.fourth[1], bz4 = mom.fourth[2];
  const double plus2 = bx2 + by2;               // b_+^2
  const double plus2_z2 = mom.xz + mom.yz;      // mean(b_+^2 bz^2)
  const double b02 = B0 * B0;
  const double t3 = tau * tau * tau;

  SeriesRates out;
  out.rate1 = 2.0 * plus2 * tau +
              (2.0 * plus2 * plus2 -
               (2.0 * b02 * plus2 + 2.0 * bx4 + 2.0 * by4 + 2.0 * mom.xy + mom.xz + mom.yz) / 3.0) *
                  t3;
  const double lead2 = bx2 + by2 + 2.0 * bz2;
  const double aniso = bx2 - by2;
  out.rate2 = lead2 * tau + (lead2 * lead2 - b02 * plus2 / 3.0 +
                             (bx4 + by4 + 2.0 * bz4 + 2.0 * mom.xy + 3.0 * plus2_z2) / 3.0 - 0.5 * aniso * aniso) *
                                t3;
  return out;
}

EigenvalueExpansion eigenvalue_expansions(const MomentSet& mom, double B0, double tau) {
  const double bx2 = mom.second[0], by2 = mom.second[1], bz2 = mom.second[2];
  const double t2 = tau * tau;
  EigenvalueExpansion out;
  out.dz = 1.0 - 2.0 * t2 * (bx2 + by2);
  const double re = 1.0 - 2.0 * t2 * B0 * B0 - t2 * (bx2 + by2 + 2.0 * bz2);
  const double aniso = bx2 - by2;
  const double radicand = t2 * B0 * B0 - 0.25 * t2 * t2 * aniso * aniso;
  if (radicand >= 0.0) {
    const double im = 2.0 * std::sqrt(radicand);
    out.d_plus = cd(re, im);
    out.d_minus = cd(re, -im);
  } else {
    const double split = 2.0 * std::sqrt(-radicand);
    out.d_plus = cd(re + split, 0.0);
    out.d_minus = cd(re - split, 0.0);
    out.overdamped = true;
  }
  return out;
}

}  // namespace decotm
