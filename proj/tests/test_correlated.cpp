#include <cmath>

#include "decotm/correlated.hpp"
#include "decotm/oracles.hpp"
#include "doctest.h"
#include "test_oracles.hpp"

using namespace decotm;

namespace {

// S by the periodic trapezoid rule on the azimuth with trace-formula rotations.
Eigen::MatrixXd s_reference(double b0, double r, double B0, double tau, int n) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(9, 9);
  for (int k = 0; k < n; ++k) {
    const double phi = 2 * M_PI * (k + 0.5) / n;
    const double p[3] = {std::sqrt(1 / (2 * M_PI)), std::sqrt(r / (2 * M_PI)) * std::cos(phi),
                         std::sqrt(r / (2 * M_PI)) * std::sin(phi)};
    const Eigen::Matrix3d t = oracle::rotation(FieldVector(b0 * std::cos(phi), b0 * std::sin(phi), B0), tau);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) s.block<3, 3>(3 * a, 3 * b) += (2 * M_PI / n) * p[a] * p[b] * t;
  }
  return s;
}

}  // namespace

TEST_CASE("S matches direct angular integration") {
  for (double r : {0.0, 0.4, 1.0}) {
    const auto k = SeparableKernel::sp_wave_mixture(0.3, r);
    const SMatrix s = build_s_matrix(k, 0.7, 1.2, quadrature(k.support(), 64));
    CHECK((s.s - s_reference(0.3, r, 0.7, 1.2, 257)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("at zero duration S is the Gram matrix of the basis times the identity") {
  const double r = 0.8;
  const auto k = SeparableKernel::sp_wave_mixture(0.5, r);
  const SMatrix s = build_s_matrix(k, 1.0, 0.0, quadrature(k.support(), 16));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(9, 9);
  const double g[3] = {1.0, r / 2, r / 2};
  for (int n = 0; n < 3; ++n) expected.block<3, 3>(3 * n, 3 * n) = g[n] * Mat3::Identity();
  CHECK((s.s - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s(1, 0, 1, 0) == doctest::Approx(r / 2));
}

TEST_CASE("uncorrelated kernel reduces to the white transfer matrix") {
  const double B0 = 0.05, b0 = 0.005;
  const auto k = SeparableKernel::sp_wave_mixture(b0, 0.0);
  const auto quad = quadrature(k.support(), 64);
  const SMatrix s = build_s_matrix(k, B0, 1.0, quad);
  const Mat3 t = build_transfer_matrix(compute_integrals(quad, B0, 1.0)).matrix();
  CHECK((s.s.block<3, 3>(0, 0) - t).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.s.block<6, 6>(3, 3).cwiseAbs().maxCoeff() == 0.0);

  const RelaxationReport a = asymptotic_rates(s, 1.0);
  const RelaxationReport w = relaxation_report(spectral_decompose(TransferMatrix(t)), 1.0);
  CHECK(a.longitudinal_rate() == doctest::Approx(w.longitudinal_rate()).epsilon(1e-9));
  CHECK(a.transverse_rate() == doctest::Approx(w.transverse_rate()).epsilon(1e-9));
  CHECK(a.omega == doctest::Approx(w.omega).epsilon(1e-9));

  const BlochVector s0(0.2, 0.5, 0.8);
  const BlochVector c = propagate_correlated(k, s0, 40, B0, 1.0, quad);
  CHECK((c.vec() - propagate_direct(TransferMatrix(t), s0, 40).vec()).norm() < 1e-13);
}

TEST_CASE("boundary vectors: exit weights pick the s-wave component") {
  const auto k = SeparableKernel::sp_wave_mixture(0.2, 0.9);
  const BoundaryVectors bv = boundary_vectors(k, BlochVector(0, 0, 1), 0.3, 1.0, quadrature(k.support(), 64));
  CHECK(bv.exit[0] == doctest::Approx(1.0));
  CHECK(std::abs(bv.exit[1]) < 1e-15);
  CHECK(std::abs(bv.exit[2]) < 1e-15);
}

TEST_CASE("correlated propagation agrees with correlated Monte Carlo") {
  const double B0 = 0.3, b0 = 0.4;
  const int m = 25;
  const auto k = SeparableKernel::sp_wave_mixture(b0, 1.0);
  const BlochVector s0(1.0, 0.0, 0.0);
  const BlochVector exact = propagate_correlated(k, s0, m, B0, 1.0, quadrature(k.support(), 64));
  const MonteCarloResult mc = monte_carlo_correlated(k, B0, 1.0, m, s0, 160000, 99, 1);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mc.mean[i] - exact[i]) <= 4 * mc.standard_error[i]);

  // Correlation matters: the white chain with the same marginal is resolvably different.
  const Mat3 t = build_transfer_matrix(compute_integrals(NoiseDistribution::planar_ring(b0), B0, 1.0,
                                                         quadrature(NoiseDistribution::planar_ring(b0))))
                     .matrix();
  const BlochVector white = propagate_direct(TransferMatrix(t), s0, m);
  CHECK((white.vec() - exact.vec()).norm() > 5 * mc.standard_error.norm());
}

TEST_CASE("p-wave correlation speeds up relaxation") {
  const auto quad = quadrature(NoiseDistribution::planar_ring(0.005), 64);
  double prev1 = 0.0, prev2 = 0.0;
  for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto k = SeparableKernel::sp_wave_mixture(0.005, r);
    const RelaxationReport rep = asymptotic_rates(build_s_matrix(k, 0.05, 1.0, quad), 1.0);
    CHECK(rep.longitudinal_rate() > prev1);
    CHECK(rep.transverse_rate() > prev2);
    prev1 = rep.longitudinal_rate();
    prev2 = rep.transverse_rate();
    CHECK(rep.modes.front().label == ModeLabel::Longitudinal);
    CHECK(spectral_radius(build_s_matrix(k, 0.05, 1.0, quad)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("a rule too coarse for the kernel is rejected") {
  const auto k = SeparableKernel::sp_wave_mixture(1.0, 0.5);
  CHECK_THROWS_AS(build_s_matrix(k, 0.1, 1.0, quadrature(k.support(), 1)), KernelNormalizationError);
  CHECK_THROWS_AS(boundary_vectors(k, BlochVector(0, 0, 1), 0.1, 1.0, quadrature(k.support(), 1)),
                  KernelNormalizationError);
}

TEST_CASE("no surviving modes above an extreme cut") {
  const auto k = SeparableKernel::sp_wave_mixture(2.0, 0.5);
  const SMatrix s = build_s_matrix(k, 1.0, 1.0, quadrature(k.support(), 64));
  CHECK_THROWS_AS(asymptotic_rates(s, 1.0, 0.999), NoSurvivingModes);
  CHECK_THROWS_AS(asymptotic_rates(s, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("S is symmetric under exchange of the basis indices") {
  const auto k = SeparableKernel::sp_wave_mixture(0.4, 0.6);
  const SMatrix s = build_s_matrix(k, 0.2, 0.9, quadrature(k.support(), 64));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(s(a, i, b, j) - s(b, i, a, j)) < 1e-15);
}

TEST_CASE("correlated propagation is linear in the initial state") {
  const auto k = SeparableKernel::sp_wave_mixture(0.3, 0.8);
  const auto q = quadrature(k.support(), 64);
  const BlochVector u(0.3, -0.1, 0.5), v(-0.2, 0.6, 0.1);
  const double al = 0.7, be = -1.3;
  const BlochVector mix(Vec3(al * u.vec() + be * v.vec()));
  const Vec3 lhs = propagate_correlated(k, mix, 30, 0.4, 1.0, q).vec();
  const Vec3 rhs = al * propagate_correlated(k, u, 30, 0.4, 1.0, q).vec() +
                   be * propagate_correlated(k, v, 30, 0.4, 1.0, q).vec();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("at r = 0 the nonzero spectrum of S is the spectrum of T") {
  const auto k = SeparableKernel::sp_wave_mixture(0.6, 0.0);
  const auto q = quadrature(k.support(), 64);
  const SMatrix s = build_s_matrix(k, 0.8, 1.0, q);
  const auto ev = Eigen::EigenSolver<MatX>(s.s).eigenvalues();
  const auto t = eigenvalues_3x3(build_transfer_matrix(compute_integrals(q, 0.8, 1.0)).matrix()).values;
  for (const cd d : t) {
    double best = 1e9;
    for (Eigen::Index i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev[i] - d));
    CHECK(best < 1e-10);
  }
  int zeros = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) zeros += std::abs(ev[i]) < 1e-12;
  CHECK(zeros == 6);
}

TEST_CASE("S eigenvalues stay in the unit disk over random parameters") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto k = SeparableKernel::sp_wave_mixture(3.0 * u(rng), u(rng));
    worst = std::max(worst, spectral_radius(build_s_matrix(k, 5.0 * u(rng), 1.0, quadrature(k.support(), 64))));
  }
  CHECK(worst <= 1.0 + 1e-9);
}
