#include <cmath>
#include <numeric>

#include "decotm/correlated.hpp"
#include "decotm/noise.hpp"
#include "doctest.h"

using namespace decotm;

namespace {

std::vector<NoiseDistribution> families() {
  return {NoiseDistribution::planar_ring(0.7),
          NoiseDistribution::sphere_shell(1.3),
          NoiseDistribution::planar_anisotropic(0.9, 0.4),
          NoiseDistribution::axis_flip(0.3, 0.5, 0.2),
          NoiseDistribution::point(FieldVector(0.1, 0.2, 0.3)),
          NoiseDistribution::discrete({FieldVector(1, 0, 0), FieldVector(0, -2, 1)}, {0.25, 0.75})};
}

}  // namespace

TEST_CASE("substreams are reproducible and distinct") {
  auto a = substream(42, 7), b = substream(42, 7), c = substream(42, 8), d = substream(43, 7);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS_AS(NoiseDistribution::planar_ring(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseDistribution::sphere_shell(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(NoiseDistribution::discrete({FieldVector(1, 0, 0)}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(NoiseDistribution::discrete({FieldVector(1, 0, 0)}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(SeparableKernel::sp_wave_mixture(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("closed-form moments of the symmetric families") {
  const double b0 = 1.7;
  const MomentSet ring = moments(NoiseDistribution::planar_ring(b0));
  CHECK(ring.second[0] == doctest::Approx(b0 * b0 / 2));
  CHECK(ring.second[2] == 0.0);
  CHECK(ring.fourth[0] == doctest::Approx(3 * std::pow(b0, 4) / 8));
  CHECK(ring.xy == doctest::Approx(std::pow(b0, 4) / 8));
  const MomentSet sphere = moments(NoiseDistribution::sphere_shell(b0));
  CHECK(sphere.second[1] == doctest::Approx(b0 * b0 / 3));
  CHECK(sphere.fourth[2] == doctest::Approx(std::pow(b0, 4) / 5));
  CHECK(sphere.yz == doctest::Approx(std::pow(b0, 4) / 15));
  const MomentSet aniso = moments(NoiseDistribution::planar_anisotropic(b0, 0.3));
  CHECK(aniso.planar_second() == doctest::Approx(b0 * b0));
  CHECK(aniso.second[1] / aniso.second[0] == doctest::Approx(0.09));
}

TEST_CASE("quadrature weights sum to one and reproduce the moments") {
  for (const auto& d : families()) {
    const QuadratureRule q = quadrature(d);
    CHECK(q.weight_sum() == doctest::Approx(1.0).epsilon(1e-14));
    const MomentSet a = moments(d), b = quadrature_moments(q);
    CHECK((a.second - b.second).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.fourth - b.fourth).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(a.xy - b.xy) < 1e-13);
    CHECK(std::abs(a.xz - b.xz) < 1e-13);
    CHECK(std::abs(a.yz - b.yz) < 1e-13);
  }
}

TEST_CASE("a one-node sphere rule gets the moments wrong") {
  const auto d = NoiseDistribution::sphere_shell(1.0);
  const MomentSet a = moments(d), b = quadrature_moments(quadrature(d, 1));
  CHECK(std::abs(a.second[2] - b.second[2]) > 0.1);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 32}) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    REQUIRE(x.size() == static_cast<std::size_t>(n));
    for (int k = 0; k < 2 * n; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("sample moments agree with the analytic ones") {
  for (const auto& d : families()) {
    CAPTURE(d.family());
    auto rng = substream(5, 0);
    const int n = 200000;
    Vec3 s2 = Vec3::Zero(), s4 = Vec3::Zero();
    for (int k = 0; k < n; ++k) {
      const Vec3 b = sample(d, rng).vec();
      s2 += b.cwiseProduct(b);
      s4 += b.cwiseProduct(b).cwiseProduct(b).cwiseProduct(b);
    }
    const MomentSet m = moments(d);
    for (int i = 0; i < 3; ++i) {
      // fourth moment bounds the variance of b_i^2
      const double se = std::sqrt(std::max(m.fourth[i] - m.second[i] * m.second[i], 0.0) / n);
      CHECK(std::abs(s2[i] / n - m.second[i]) <= 5 * se + 1e-10 * m.second[i]);
    }
  }
}

TEST_CASE("ring and sphere samples lie on their shell") {
  auto rng = substream(9, 0);
  for (int k = 0; k < 1000; ++k) {
    const FieldVector r = sample(NoiseDistribution::planar_ring(2.0), rng);
    CHECK(r.norm() == doctest::Approx(2.0));
    CHECK(r.z == 0.0);
    CHECK(sample(NoiseDistribution::sphere_shell(0.5), rng).norm() == doctest::Approx(0.5));
  }
}

TEST_CASE("s/p kernel integrates to one against the uniform rule") {
  for (double r : {0.0, 0.3, 1.0}) {
    const auto k = SeparableKernel::sp_wave_mixture(1.0, r);
    CHECK(marginal_normalization_defect(k, quadrature(k.support(), 8)) < 1e-14);
    CHECK(k.density(FieldVector(1, 0, 0), FieldVector(-1, 0, 0)) ==
          doctest::Approx((1 - r) / (2 * M_PI)));
  }
  const auto k = SeparableKernel::sp_wave_mixture(1.0, 0.6);
  CHECK(marginal_normalization_defect(k, quadrature(k.support(), 1)) == doctest::Approx(0.6));
}

TEST_CASE("conditional steps follow (1 + r cos delta) / 2pi") {
  for (double r : {0.0, 0.5, 1.0}) {
    const auto k = SeparableKernel::sp_wave_mixture(1.0, r);
    auto rng = substream(3, 1);
    const int n = 100000;
    double c1 = 0.0, c2 = 0.0, s1 = 0.0;
    FieldVector prev(std::cos(0.4), std::sin(0.4), 0.0);
    for (int i = 0; i < n; ++i) {
      const FieldVector next = conditional_sample(k, prev, rng);
      CHECK(next.norm() == doctest::Approx(1.0));
      const double delta = azimuth(next) - azimuth(prev);
      c1 += std::cos(delta);
      c2 += std::cos(2 * delta);
      s1 += std::sin(delta);
      prev = next;
    }
    // E cos(delta) = r / 2, E cos(2 delta) = E sin(delta) = 0
    const double se = std::sqrt(0.5 / n);
    CHECK(std::abs(c1 / n - r / 2) < 5 * se);
    CHECK(std::abs(c2 / n) < 5 * se);
    CHECK(std::abs(s1 / n) < 5 * se);
  }
}

TEST_CASE("kernel is symmetric on the grid") {
  const auto k = SeparableKernel::sp_wave_mixture(1.0, 0.7);
  const auto q = quadrature(k.support(), 32);
  for (const auto& a : q.nodes)
    for (const auto& b : q.nodes) CHECK(k.density(a.field, b.field) - k.density(b.field, a.field) == 0.0);
}

TEST_CASE("the uniform ring is stationary under the conditional chain") {
  const auto k = SeparableKernel::sp_wave_mixture(1.0, 1.0);
  auto rng = substream(21, 0);
  const int bins = 16, n = 160000;
  std::vector<int> hist(bins, 0);
  FieldVector b(1.0, 0.0, 0.0);  // start far from any particular bin pattern
  for (int i = 0; i < n; ++i) {
    b = conditional_sample(k, b, rng);
    ++hist[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>(azimuth(b) / (2 * M_PI) * bins)))];
  }
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0.0;
  for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
  // 15 degrees of freedom; the chain is positively correlated, so allow a wide margin
  CHECK(chi2 < 60.0);
}
