#include <cmath>
#include <numbers>
#include <stdexcept>

#include "decotm/noise.hpp"

namespace decotm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Uniform azimuth grid phi_k = 2 pi k / n; exact for trigonometric polynomials of degree < n.
template <class Map>
void azimuth_nodes(QuadratureRule& rule, int n, Map&& to_field) {
  rule.nodes.reserve(static_cast<std::size_t>(n));
  const double w = 1.0 / n;
  for (int k = 0; k < n; ++k) {
    const double phi = kTwoPi * k / n;
    rule.nodes.push_back({to_field(phi), w});
  }
}

}  // namespace

double QuadratureRule::weight_sum() const {
  double s = 0.0;
  for (const auto& n : nodes) s += n.weight;
  return s;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

QuadratureRule quadrature(const NoiseDistribution& dist, int order) {
  if (order < 1) throw std::invalid_argument("quadrature: order must be >= 1");
  QuadratureRule rule;
  rule.order = order;
  std::visit(overloaded{
                 [&](const PlanarRing& d) {
                   azimuth_nodes(rule, order, [&](double phi) {
                     return FieldVector(d.b0 * std::cos(phi), d.b0 * std::sin(phi), 0.0);
                   });
                 },
                 [&](const PlanarAnisotropic& d) {
                   const double a = d.b0 * std::sqrt(2.0 / (1.0 + d.lambda * d.lambda));
                   azimuth_nodes(rule, order, [&](double phi) {
                     return FieldVector(a * std::cos(phi), a * d.lambda * std::sin(phi), 0.0);
                   });
                 },
                 [&](const SphereShell& d) {
                   const int n_theta = std::max(1, order / 2);
                   std::vector<double> x, w;
                   gauss_legendre(n_theta, x, w);
                   rule.nodes.reserve(static_cast<std::size_t>(n_theta * order));
                   for (int i = 0; i < n_theta; ++i) {
                     const double cz = x[static_cast<std::size_t>(i)];
                     const double st = std::sqrt(1.0 - cz * cz);
                     const double wt = 0.5 * w[static_cast<std::size_t>(i)] / order;
                     for (int k = 0; k < order; ++k) {
                       const double phi = kTwoPi * k / order;
                       rule.nodes.push_back(
                           {FieldVector(d.b0 * st * std::cos(phi), d.b0 * st * std::sin(phi), d.b0 * cz), wt});
                     }
                   }
                 },
                 [&](const AxisFlip& d) {
                   for (int mask = 0; mask < 8; ++mask) {
                     rule.nodes.push_back({FieldVector((mask & 1) ? d.bx : -d.bx, (mask & 2) ? d.by : -d.by,
                                                       (mask & 4) ? d.bz : -d.bz),
                                           0.125});
                   }
                 },
                 [&](const PointField& d) { rule.nodes.push_back({d.b, 1.0}); },
                 [&](const Discrete& d) {
                   for (std::size_t i = 0; i < d.atoms.size(); ++i) rule.nodes.push_back({d.atoms[i], d.weights[i]});
                 },
             },
             dist.law());
  return rule;
}

}  // namespace decotm
