#include "decotm/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "decotm/detail/assemble.hpp"

namespace decotm {

namespace {

using Vec3c = Eigen::Vector3cd;

constexpr double kClusterTol = 1e-7;
constexpr double kRankTol = 1e-6;
constexpr double kDiagonalTol = 1e-9;
constexpr double kDampingBoundary = 1e-12;

bool is_real(cd d) { return std::abs(d.imag()) < kRealThreshold * std::max(1.0, std::abs(d)); }

// Eigen's cross() conjugates complex results; the null space needs the plain bilinear form.
Vec3c cross(const Vec3c& a, const Vec3c& b) {
  return Vec3c(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

// Null vector of a (numerically) rank-2 matrix from the largest cross product of two rows.
// `quality` is that cross product's norm relative to the squared largest row norm.
Vec3c null_vector(const Mat3c& m, double* quality = nullptr) {
  const Vec3c r0 = m.row(0).transpose(), r1 = m.row(1).transpose(), r2 = m.row(2).transpose();
  const std::array<Vec3c, 3> candidates{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (candidates[k].norm() > candidates[best].norm()) best = k;
  }
  const double row_scale = std::max({r0.squaredNorm(), r1.squaredNorm(), r2.squaredNorm()});
  if (quality) *quality = row_scale > 0.0 ? candidates[best].norm() / row_scale : 0.0;
  const double n = candidates[best].norm();
  return n > 0.0 ? Vec3c(candidates[best] / n) : Vec3c(0, 0, 1);
}

// Rotate the phase so the largest component is real and positive; a real
// eigenvector then comes out exactly real.
Vec3c fix_phase(const Vec3c& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const cd ph = std::abs(v[k]) > 0.0 ? std::conj(v[k]) / std::abs(v[k]) : cd(1.0);
  return v * ph;
}

Vec3c real_vector(const Vec3c& v) {
  Vec3c out = fix_phase(v);
  for (int i = 0; i < 3; ++i) out[i] = out[i].real();
  return out / out.norm();
}

// Polishes a simple eigenvalue with the two-sided Rayleigh quotient and returns its right vector.
Vec3c refine(const Mat3& t, cd& value) {
  const Mat3c tc = t.cast<cd>();
  Vec3c right = null_vector(tc - value * Mat3c::Identity());
  for (int iter = 0; iter < 2; ++iter) {
    const Vec3c left = null_vector((tc - value * Mat3c::Identity()).transpose());
    const cd denom = (left.transpose() * right)(0, 0);
    // Near-defective: left and right vectors almost orthogonal, the quotient is unreliable.
    if (std::abs(denom) < 1e-8) break;
    value = (left.transpose() * tc * right)(0, 0) / denom;
    right = null_vector(tc - value * Mat3c::Identity());
  }
  return right;
}

struct Eigenpair {
  cd value;
  Vec3c vector;
};

double z_weight(const Vec3c& v) { return std::abs(v[2]) / v.norm(); }

}  // namespace

bool IntegralSet::symmetric_case(double tol) const {
  return std::abs(i[0]) <= tol && std::abs(i[1]) <= tol && std::abs(ij(0, 1)) <= tol && std::abs(ij(0, 2)) <= tol &&
         std::abs(ij(1, 2)) <= tol;
}

IntegralSet compute_integrals(const QuadratureRule& quad, double B0, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("compute_integrals: tau must be >= 0");
  IntegralSet out;
  out.i0 = 0.0;
  out.B0 = B0;
  out.tau = tau;
  for (const auto& node : quad.nodes) {
    const FieldVector total(node.field.x, node.field.y, node.field.z + B0);
    const Su2Params p = su2_params(total, tau);
    const double w = node.weight;
    out.i0 += w * (p.c * p.c);
    out.i += w * (p.c * p.s);
    out.ij += w * (p.s * p.s.transpose());
  }
  if (!(out.sum_rule_defect() <= kSumRuleTolerance)) {
    throw SumRuleViolation("sum rule I0 + Ixx + Iyy + Izz = 1 violated by " + std::to_string(out.sum_rule_defect()) +
                           " (quadrature weights sum to " + std::to_string(quad.weight_sum()) + ")");
  }
  return out;
}

IntegralSet compute_integrals(const NoiseDistribution& /*dist*/, double B0, double tau, const QuadratureRule& quad) {
  return compute_integrals(quad, B0, tau);
}

double TransferMatrix::max_singular_value() const {
  return Eigen::JacobiSVD<Mat3>(m_).singularValues()[0];
}

TransferMatrix build_transfer_matrix(const IntegralSet& ints) {
  return TransferMatrix(detail::assemble_transfer(ints.i0, ints.i, ints.ij));
}

Spectrum spectral_decompose(const TransferMatrix& tm) {
  const Mat3& t = tm.matrix();
  if (!t.allFinite()) throw std::invalid_argument("spectral_decompose: non-finite transfer matrix");

  const CubicEigenvalues raw = eigenvalues_3x3(t);
  Spectrum spec;
  spec.t = t;
  spec.used_fallback = raw.used_fallback;

  std::vector<Eigenpair> pairs;
  const auto n_real = std::count_if(raw.values.begin(), raw.values.end(), is_real);

  if (n_real < 3) {
    spec.kind = SpectrumKind::RealPlusPair;
    std::size_t ir = 0, ic = 0;
    double best_imag = -1.0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (std::abs(raw.values[k].imag()) < std::abs(raw.values[ir].imag())) ir = k;
      if (raw.values[k].imag() > best_imag) {
        best_imag = raw.values[k].imag();
        ic = k;
      }
    }
    cd dr = raw.values[ir].real();
    Vec3c vr = real_vector(refine(t, dr));
    dr = dr.real();
    cd dc = raw.values[ic];
    Vec3c vc = fix_phase(refine(t, dc));
    if (dc.imag() < 0.0) {
      dc = std::conj(dc);
      vc = vc.conjugate();
    }
    pairs = {{dr, vr}, {dc, vc}, {std::conj(dc), vc.conjugate()}};
  } else {
    spec.kind = SpectrumKind::ThreeReal;
    std::array<double, 3> vals{raw.values[0].real(), raw.values[1].real(), raw.values[2].real()};
    std::sort(vals.begin(), vals.end());
    double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
    const bool gap01 = vals[1] - vals[0] <= kClusterTol * scale;
    const bool gap12 = vals[2] - vals[1] <= kClusterTol * scale;

    if (gap01 && gap12) {
      const double mean = (vals[0] + vals[1] + vals[2]) / 3.0;
      const Mat3 m = t - mean * Mat3::Identity();
      if (m.cwiseAbs().maxCoeff() > kRankTol * scale) {
        throw DegenerateSpectrum("triple eigenvalue with a defective transfer matrix");
      }
      for (int k = 0; k < 3; ++k) pairs.push_back({vals[static_cast<std::size_t>(k)], Vec3c::Unit(k)});
    } else if (gap01 || gap12) {
      const std::size_t lone = gap01 ? 2 : 0;
      const double mean = gap01 ? 0.5 * (vals[0] + vals[1]) : 0.5 * (vals[1] + vals[2]);
      const Mat3 m = t - mean * Mat3::Identity();
      double quality = 0.0;
      null_vector(m.cast<cd>(), &quality);
      if (quality > kRankTol) {
        throw DegenerateSpectrum("double eigenvalue " + std::to_string(mean) + " has a single eigenvector");
      }
      // Rank one: the eigenspace is the plane orthogonal to the dominant row.
      Eigen::Index row = 0;
      m.rowwise().norm().maxCoeff(&row);
      Vec3 r = m.row(row).transpose();
      Vec3 v1, v2;
      if (r.norm() == 0.0) {
        throw DegenerateSpectrum("double eigenvalue with a vanishing shifted matrix");
      }
      r.normalize();
      Eigen::Index least = 0;
      r.cwiseAbs().minCoeff(&least);
      v1 = r.cross(Vec3::Unit(least)).normalized();
      v2 = r.cross(v1).normalized();
      cd lone_value = vals[lone];
      const Vec3c lone_vec = real_vector(refine(t, lone_value));
      const std::size_t d0 = gap01 ? 0 : 1;
      pairs.push_back({lone_value.real(), lone_vec});
      pairs.push_back({vals[d0], v1.cast<cd>()});
      pairs.push_back({vals[d0 + 1], v2.cast<cd>()});
    } else {
      for (double v : vals) {
        cd value = v;
        const Vec3c vec = real_vector(refine(t, value));
        pairs.push_back({value.real(), vec});
      }
    }
  }

  // Order: longitudinal (z-like) first, then the transverse pair.
  if (spec.kind == SpectrumKind::ThreeReal) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const Eigenpair& a, const Eigenpair& b) {
      return std::abs(a.value) > std::abs(b.value);
    });
    auto first = std::max_element(pairs.begin(), pairs.end(), [](const Eigenpair& a, const Eigenpair& b) {
      return z_weight(a.vector) + 1e-12 < z_weight(b.vector);
    });
    std::rotate(pairs.begin(), first, first + 1);
  }

  for (int k = 0; k < 3; ++k) {
    spec.values[static_cast<std::size_t>(k)] = pairs[static_cast<std::size_t>(k)].value;
    spec.right.col(k) = pairs[static_cast<std::size_t>(k)].vector;
  }
  Eigen::FullPivLU<Mat3c> lu(spec.right);
  if (!lu.isInvertible()) throw DegenerateSpectrum("eigenvector matrix is singular");
  spec.left = lu.inverse();

  const Mat3c d = spec.left * t.cast<cd>() * spec.right;
  double off = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) off = std::max(off, std::abs(d(i, j)));
  const double tol = kDiagonalTol * std::max(1.0, t.cwiseAbs().maxCoeff());
  if (!(off <= tol)) {
    throw DegenerateSpectrum("R T R^-1 not diagonal (off-diagonal " + std::to_string(off) + ")");
  }
  for (int k = 0; k < 3; ++k) {
    if (!(std::abs(d(k, k) - spec.values[static_cast<std::size_t>(k)]) <= tol)) {
      throw std::logic_error("spectral_decompose: eigenvector does not match its eigenvalue");
    }
  }
  return spec;
}

std::string to_string(DampingClass c) {
  switch (c) {
    case DampingClass::Underdamped:
      return "underdamped";
    case DampingClass::Overdamped:
      return "overdamped";
    case DampingClass::Boundary:
      return "boundary";
  }
  return "unknown";
}

std::string to_string(ModeLabel l) {
  switch (l) {
    case ModeLabel::Longitudinal:
      return "T1";
    case ModeLabel::Transverse:
      return "T2";
    case ModeLabel::Transient:
      return "transient";
    case ModeLabel::Ambiguous:
      return "ambiguous";
  }
  return "unknown";
}

double RelaxationReport::longitudinal_rate() const {
  for (const auto& m : modes)
    if (m.label == ModeLabel::Longitudinal) return m.rate;
  return std::numeric_limits<double>::quiet_NaN();
}

double RelaxationReport::transverse_rate() const {
  for (const auto& m : modes)
    if (m.label == ModeLabel::Transverse) return m.rate;
  return std::numeric_limits<double>::quiet_NaN();
}

RelaxationMode decay_mode(cd d, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("relaxation rates need tau > 0");
  RelaxationMode mode;
  mode.eigenvalue = d;
  const double re = d.real(), im = d.imag();
  const double mag2 = re * re + im * im;
  if (mag2 == 0.0) {
    mode.capped = true;
    mode.rate = -std::log(std::numeric_limits<double>::min()) / tau;
  } else if (mag2 >= 1.0) {
    mode.non_decaying = true;
    mode.rate = 0.0;
  } else {
    // ln|d| = log1p(|d|^2 - 1) / 2 with |d|^2 - 1 formed without cancellation.
    const double excess = (re - 1.0) * (re + 1.0) + im * im;
    mode.rate = -0.5 * std::log1p(excess) / tau;
  }
  return mode;
}

RelaxationReport relaxation_report(const Spectrum& spec, double tau) {
  RelaxationReport rep;
  for (std::size_t k = 0; k < 3; ++k) {
    RelaxationMode mode = decay_mode(spec.values[k], tau);
    mode.label = k == 0 ? ModeLabel::Longitudinal : ModeLabel::Transverse;
    rep.modes.push_back(mode);
  }
  if (spec.kind == SpectrumKind::RealPlusPair) {
    rep.omega = std::abs(std::atan2(spec.values[1].imag(), spec.values[1].real())) / tau;
    rep.damping = DampingClass::Underdamped;
  } else {
    rep.omega = 0.0;
    rep.damping = DampingClass::Overdamped;
  }
  rep.right = spec.right;
  return rep;
}

BlochVector propagate(const Spectrum& spec, const BlochVector& s0, int m) {
  if (m < 0) throw std::invalid_argument("propagate: m must be >= 0");
  if (m == 0) return s0;
  Eigen::Vector3cd v = spec.left * s0.vec().cast<cd>();
  for (int k = 0; k < 3; ++k) {
    const cd d = spec.values[static_cast<std::size_t>(k)];
    v[k] *= std::abs(d) == 0.0 ? cd(0.0) : std::polar(std::pow(std::abs(d), m), m * std::arg(d));
  }
  const BlochVector out(Vec3((spec.right * v).real()));
#ifndef NDEBUG
  if (m <= 64) {
    const BlochVector direct = propagate_direct(TransferMatrix(spec.t), s0, m);
    if ((direct.vec() - out.vec()).norm() > 1e-9 * std::max(1.0, s0.norm())) {
      throw std::logic_error("spectral propagation disagrees with direct powers");
    }
  }
#endif
  return out;
}

BlochVector propagate_direct(const TransferMatrix& t, const BlochVector& s0, int m) {
  if (m < 0) throw std::invalid_argument("propagate: m must be >= 0");
  Vec3 v = s0.vec();
  for (int k = 0; k < m; ++k) v = t.matrix() * v;
  return BlochVector(v);
}

BlochVector propagate(const TransferMatrix& t, const BlochVector& s0, int m) {
  try {
    return propagate(spectral_decompose(t), s0, m);
  } catch (const DegenerateSpectrum&) {
    return propagate_direct(t, s0, m);
  }
}

double damping_discriminant(const IntegralSet& ints) {
  const double iz = ints.i[2];
  const double aniso = ints.ij(0, 0) - ints.ij(1, 1);
  return 4.0 * iz * iz - aniso * aniso;
}

DampingClass classify_damping(const IntegralSet& ints) {
  if (ints.symmetric_case()) {
    const double disc = damping_discriminant(ints);
    if (std::abs(disc) <= kDampingBoundary) return DampingClass::Boundary;
    return disc > 0.0 ? DampingClass::Underdamped : DampingClass::Overdamped;
  }
  const auto ev = eigenvalues_3x3(build_transfer_matrix(ints).matrix());
  const bool pair = std::any_of(ev.values.begin(), ev.values.end(), [](cd d) { return !is_real(d); });
  return pair ? DampingClass::Underdamped : DampingClass::Overdamped;
}

}  // namespace decotm
