#include "decotm/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace decotm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double anisotropic_amplitude(const PlanarAnisotropic& d) {
  return d.b0 * std::sqrt(2.0 / (1.0 + d.lambda * d.lambda));
}

void accumulate_moments(MomentSet& m, const FieldVector& b, double w) {
  const double x2 = b.x * b.x, y2 = b.y * b.y, z2 = b.z * b.z;
  m.second += w * Vec3(x2, y2, z2);
  m.fourth += w * Vec3(x2 * x2, y2 * y2, z2 * z2);
  m.xy += w * x2 * y2;
  m.xz += w * x2 * z2;
  m.yz += w * y2 * z2;
}

}  // namespace

RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
  return RandomStream(splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

NoiseDistribution::NoiseDistribution(Law law) : law_(std::move(law)) {
  std::visit(overloaded{
                 [](const PlanarRing& d) { require(nonneg_finite(d.b0), "planar_ring: b0 must be >= 0"); },
                 [](const SphereShell& d) { require(nonneg_finite(d.b0), "sphere_shell: b0 must be >= 0"); },
                 [](const PlanarAnisotropic& d) {
                   require(nonneg_finite(d.b0), "planar_anisotropic: b0 must be >= 0");
                   require(nonneg_finite(d.lambda), "planar_anisotropic: lambda must be >= 0");
                 },
                 [](const AxisFlip& d) {
                   require(nonneg_finite(d.bx) && nonneg_finite(d.by) && nonneg_finite(d.bz),
                           "axis_flip: components must be >= 0");
                 },
                 [](const PointField& d) { require(d.b.finite(), "point: field must be finite"); },
                 [](const Discrete& d) {
                   require(!d.atoms.empty(), "discrete: no atoms");
                   require(d.atoms.size() == d.weights.size(), "discrete: atom/weight count mismatch");
                   double sum = 0.0;
                   for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                     require(d.atoms[i].finite(), "discrete: non-finite atom");
                     require(nonneg_finite(d.weights[i]), "discrete: weights must be >= 0");
                     sum += d.weights[i];
                   }
                   require(std::abs(sum - 1.0) <= 1e-12, "discrete: weights must sum to 1");
                 },
             },
             law_);
}

std::string NoiseDistribution::family() const {
  return std::visit(overloaded{
                        [](const PlanarRing&) { return std::string("planar_ring"); },
                        [](const SphereShell&) { return std::string("sphere_shell"); },
                        [](const PlanarAnisotropic&) { return std::string("planar_anisotropic"); },
                        [](const AxisFlip&) { return std::string("axis_flip"); },
                        [](const PointField&) { return std::string("point"); },
                        [](const Discrete&) { return std::string("discrete"); },
                    },
                    law_);
}

MomentSet moments(const NoiseDistribution& dist) {
  MomentSet m;
  std::visit(overloaded{
                 [&](const PlanarRing& d) {
                   const double b2 = d.b0 * d.b0, b4 = b2 * b2;
                   m.second = Vec3(b2 / 2, b2 / 2, 0.0);
                   m.fourth = Vec3(3 * b4 / 8, 3 * b4 / 8, 0.0);
                   m.xy = b4 / 8;
                 },
                 [&](const SphereShell& d) {
                   const double b2 = d.b0 * d.b0, b4 = b2 * b2;
                   m.second = Vec3::Constant(b2 / 3);
                   m.fourth = Vec3::Constant(b4 / 5);
                   m.xy = m.xz = m.yz = b4 / 15;
                 },
                 [&](const PlanarAnisotropic& d) {
                   const double a = anisotropic_amplitude(d);
                   const double a2 = a * a, a4 = a2 * a2, l2 = d.lambda * d.lambda;
                   m.second = Vec3(a2 / 2, a2 * l2 / 2, 0.0);
                   m.fourth = Vec3(3 * a4 / 8, 3 * a4 * l2 * l2 / 8, 0.0);
                   m.xy = a4 * l2 / 8;
                 },
                 [&](const AxisFlip& d) { accumulate_moments(m, FieldVector(d.bx, d.by, d.bz), 1.0); },
                 [&](const PointField& d) { accumulate_moments(m, d.b, 1.0); },
                 [&](const Discrete& d) {
                   for (std::size_t i = 0; i < d.atoms.size(); ++i) accumulate_moments(m, d.atoms[i], d.weights[i]);
                 },
             },
             dist.law());
  return m;
}

MomentSet quadrature_moments(const QuadratureRule& rule) {
  MomentSet m;
  for (const auto& n : rule.nodes) accumulate_moments(m, n.field, n.weight);
  return m;
}

FieldVector sample(const NoiseDistribution& dist, RandomStream& stream) {
  return std::visit(
      overloaded{
          [&](const PlanarRing& d) {
            const double phi = std::uniform_real_distribution<double>(0.0, kTwoPi)(stream);
            return FieldVector(d.b0 * std::cos(phi), d.b0 * std::sin(phi), 0.0);
          },
          [&](const SphereShell& d) {
            const double cz = std::uniform_real_distribution<double>(-1.0, 1.0)(stream);
            const double phi = std::uniform_real_distribution<double>(0.0, kTwoPi)(stream);
            const double st = std::sqrt(std::max(0.0, 1.0 - cz * cz));
            return FieldVector(d.b0 * st * std::cos(phi), d.b0 * st * std::sin(phi), d.b0 * cz);
          },
          [&](const PlanarAnisotropic& d) {
            const double a = anisotropic_amplitude(d);
            const double phi = std::uniform_real_distribution<double>(0.0, kTwoPi)(stream);
            return FieldVector(a * std::cos(phi), a * d.lambda * std::sin(phi), 0.0);
          },
          [&](const AxisFlip& d) {
            const std::uint64_t bits = stream();
            return FieldVector((bits & 1u) ? d.bx : -d.bx, (bits & 2u) ? d.by : -d.by, (bits & 4u) ? d.bz : -d.bz);
          },
          [&](const PointField& d) { return d.b; },
          [&](const Discrete& d) {
            const double u = std::uniform_real_distribution<double>(0.0, 1.0)(stream);
            double acc = 0.0;
            for (std::size_t i = 0; i < d.atoms.size(); ++i) {
              acc += d.weights[i];
              if (u < acc) return d.atoms[i];
            }
            return d.atoms.back();
          },
      },
      dist.law());
}

double azimuth(const FieldVector& b) {
  double phi = std::atan2(b.y, b.x);
  if (phi < 0.0) phi += kTwoPi;
  return phi;
}

}  // namespace decotm
