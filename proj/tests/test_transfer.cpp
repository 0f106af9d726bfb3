#include <cmath>
#include <random>

#include "decotm/eigen3x3.hpp"
#include "decotm/transfer.hpp"
#include "doctest.h"
#include "test_oracles.hpp"

using namespace decotm;

namespace {

IntegralSet integrals(const NoiseDistribution& d, double B0, double tau) {
  return compute_integrals(d, B0, tau, quadrature(d));
}

Mat3 transfer(const NoiseDistribution& d, double B0, double tau) {
  return build_transfer_matrix(integrals(d, B0, tau)).matrix();
}

}  // namespace

TEST_CASE("ring integrals in closed form") {
  const double B0 = 0.8, b0 = 0.6, tau = 1.7;
  const IntegralSet ints = integrals(NoiseDistribution::planar_ring(b0), B0, tau);
  const double B = std::hypot(B0, b0), c = std::cos(B * tau), s = std::sin(B * tau);
  CHECK(ints.i0 == doctest::Approx(c * c).epsilon(1e-14));
  CHECK(ints.i[2] == doctest::Approx(c * s * B0 / B).epsilon(1e-14));
  CHECK(std::abs(ints.i[0]) < 1e-15);
  CHECK(std::abs(ints.i[1]) < 1e-15);
  CHECK(ints.ij(2, 2) == doctest::Approx(s * s * B0 * B0 / (B * B)).epsilon(1e-14));
  CHECK(ints.ij(0, 0) == doctest::Approx(s * s * b0 * b0 / (2 * B * B)).epsilon(1e-13));
  CHECK(ints.ij(1, 1) == doctest::Approx(s * s * b0 * b0 / (2 * B * B)).epsilon(1e-13));
  CHECK(ints.symmetric_case());
}

TEST_CASE("T is the average of the trace-formula rotations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const auto d = oracle::random_discrete(rng, 1 + k % 7, 2.0);
    const auto& law = std::get<Discrete>(d.law());
    const double B0 = u(rng), tau = u(rng);
    const Mat3 expected = oracle::average_rotation(law.atoms, law.weights, B0, tau);
    CHECK((transfer(d, B0, tau) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sum rule holds for every family") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 100; ++k) {
    const auto d = oracle::random_discrete(rng, 4, 5.0);
    CHECK(integrals(d, 2.0, 0.9).sum_rule_defect() < 1e-12);
  }
  for (const auto& d : {NoiseDistribution::planar_ring(3.0), NoiseDistribution::sphere_shell(3.0),
                        NoiseDistribution::axis_flip(1, 2, 3)}) {
    CHECK(integrals(d, 0.4, 2.5).sum_rule_defect() < 1e-12);
  }
}

TEST_CASE("a rule whose weights do not sum to one breaks the sum rule") {
  QuadratureRule bad;
  bad.nodes.push_back({FieldVector(1, 0, 0), 0.9});
  CHECK_THROWS_AS(compute_integrals(bad, 0.1, 1.0), SumRuleViolation);
}

TEST_CASE("eigenvalues stay in the unit disk") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto d = oracle::random_discrete(rng, 1 + k % 9, u(rng));
    const auto ev = eigenvalues_3x3(transfer(d, u(rng), 1.0));
    for (const cd v : ev.values) worst = std::max(worst, std::abs(v));
  }
  CHECK(worst <= 1.0 + 1e-10);
}

TEST_CASE("symmetric noise decouples z") {
  const Mat3 t = transfer(NoiseDistribution::planar_ring(0.4), 0.9, 1.0);
  CHECK(std::abs(t(0, 2)) < 1e-15);
  CHECK(std::abs(t(2, 0)) < 1e-15);
  CHECK(std::abs(t(1, 2)) < 1e-15);
  CHECK(std::abs(t(2, 1)) < 1e-15);
  CHECK(t(0, 0) == doctest::Approx(t(1, 1)));
  CHECK(t(0, 1) == doctest::Approx(-t(1, 0)));
  CHECK(t(0, 1) > 0.0);
}

TEST_CASE("isotropic noise without a static field shrinks uniformly") {
  const Mat3 t = transfer(NoiseDistribution::sphere_shell(0.7), 0.0, 1.0);
  const double d = t(0, 0);
  CHECK((t - d * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-13);
  const Spectrum spec = spectral_decompose(TransferMatrix(t));
  for (const cd v : spec.values) CHECK(std::abs(v - d) < 1e-12);
  const RelaxationReport rep = relaxation_report(spec, 1.0);
  CHECK(rep.longitudinal_rate() == doctest::Approx(rep.transverse_rate()));
}

TEST_CASE("spectral decomposition diagonalizes T with ordered labels") {
  const TransferMatrix t(transfer(NoiseDistribution::planar_ring(0.05), 0.5, 1.0));
  const Spectrum spec = spectral_decompose(t);
  CHECK(spec.kind == SpectrumKind::RealPlusPair);
  CHECK(spec.values[0].imag() == 0.0);
  CHECK(spec.values[1].imag() > 0.0);
  CHECK(spec.values[2] == std::conj(spec.values[1]));
  CHECK(spec.values[0].real() == doctest::Approx(t(2, 2)));
  const Mat3c d = spec.left * t.matrix().cast<cd>() * spec.right;
  for (int k = 0; k < 3; ++k) CHECK(std::abs(d(k, k) - spec.values[static_cast<std::size_t>(k)]) < 1e-13);
  CHECK(relaxation_report(spec, 1.0).omega == doctest::Approx(std::arg(spec.values[1])));
}

TEST_CASE("spectral and direct propagation agree") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const auto d = oracle::random_discrete(rng, 3, u(rng));
    const TransferMatrix t(transfer(d, u(rng), 1.0));
    const BlochVector s0(0.6, -0.3, 0.7);
    for (int m : {0, 1, 7, 50}) {
      const BlochVector a = propagate(t, s0, m), b = propagate_direct(t, s0, m);
      CHECK((a.vec() - b.vec()).norm() < 1e-10);
    }
  }
}

TEST_CASE("defective matrices are reported and propagate falls back") {
  Mat3 j;
  j << 0.5, 1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.9;
  CHECK_THROWS_AS(spectral_decompose(TransferMatrix(j)), DegenerateSpectrum);
  const BlochVector s0(0.0, 1.0, 0.0);
  const BlochVector out = propagate(TransferMatrix(j), s0, 3);
  CHECK(out.x == doctest::Approx(3 * 0.25));
  CHECK(out.y == doctest::Approx(0.125));
}

TEST_CASE("decay modes clamp at the unit circle and at zero") {
  const RelaxationMode one = decay_mode(cd(1.0, 0.0), 1.0);
  CHECK(one.rate == 0.0);
  CHECK(one.non_decaying);
  const RelaxationMode zero = decay_mode(cd(0.0, 0.0), 2.0);
  CHECK(zero.capped);
  CHECK(std::isfinite(zero.rate));
  CHECK(zero.rate > 300.0);
  const RelaxationMode m = decay_mode(std::polar(0.9, 0.3), 0.5);
  CHECK(m.rate == doctest::Approx(-std::log(0.9) / 0.5));
}

TEST_CASE("cubic roots") {
  auto r = solve_cubic(-6.0, 11.0, -6.0);  // (x-1)(x-2)(x-3)
  std::sort(r.begin(), r.end(), [](cd a, cd b) { return a.real() < b.real(); });
  for (int k = 0; k < 3; ++k) CHECK(std::abs(r[static_cast<std::size_t>(k)] - cd(k + 1.0)) < 1e-13);
  const auto c = solve_cubic(-1.0, 1.0, -1.0);  // (x-1)(x^2+1)
  int found = 0;
  for (const cd v : c) found += std::abs(v - cd(0, 1)) < 1e-13 || std::abs(v - cd(0, -1)) < 1e-13 || std::abs(v - 1.0) < 1e-13;
  CHECK(found == 3);
  CHECK(cubic_discriminant(-6.0, 11.0, -6.0) > 0.0);
  CHECK(cubic_discriminant(-1.0, 1.0, -1.0) < 0.0);
}

TEST_CASE("repeated eigenvalues go through the Hessenberg fallback") {
  const auto ev = eigenvalues_3x3(0.3 * Mat3::Identity());
  CHECK(ev.used_fallback);
  for (const cd v : ev.values) CHECK(std::abs(v - 0.3) < 1e-14);
  Mat3 m;
  m << 2, 1, 0, -1, 2, 0, 0, 0, 5;
  const auto ev2 = eigenvalues_3x3(m);
  CHECK_FALSE(ev2.used_fallback);
}

TEST_CASE("damping discriminant classifies ring noise as underdamped") {
  const IntegralSet ints = integrals(NoiseDistribution::planar_ring(0.3), 0.4, 1.0);
  CHECK(damping_discriminant(ints) > 0.0);
  CHECK(classify_damping(ints) == DampingClass::Underdamped);
}

TEST_CASE("anisotropic noise without static field is overdamped") {
  const auto d = NoiseDistribution::axis_flip(0.5, 0.1, 0.0);
  const IntegralSet ints = integrals(d, 0.0, 1.0);
  CHECK(classify_damping(ints) == DampingClass::Overdamped);
  const Spectrum spec = spectral_decompose(build_transfer_matrix(ints));
  CHECK(spec.kind == SpectrumKind::ThreeReal);
  CHECK(relaxation_report(spec, 1.0).omega == 0.0);
}
