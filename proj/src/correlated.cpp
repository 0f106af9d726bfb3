#include "decotm/correlated.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decotm {

namespace {

void check_normalization(const SeparableKernel& k, const QuadratureRule& quad) {
  const double defect = marginal_normalization_defect(k, quad);
  if (!(defect <= kKernelNormalizationTol)) {
    std::ostringstream os;
    os << "kernel marginal not normalized on the quadrature grid (defect " << defect << ", order " << quad.order
       << ")";
    throw KernelNormalizationError(os.str());
  }
}

VecX basis_values(const SeparableKernel& k, const FieldVector& b) {
  VecX p(static_cast<Eigen::Index>(k.size()));
  for (std::size_t n = 0; n < k.size(); ++n) p[static_cast<Eigen::Index>(n)] = k.basis()[n](b);
  return p;
}

int rank_of(ModeLabel l) {
  switch (l) {
    case ModeLabel::Longitudinal:
      return 0;
    case ModeLabel::Transverse:
      return 1;
    case ModeLabel::Ambiguous:
      return 2;
    case ModeLabel::Transient:
      return 3;
  }
  return 4;
}

}  // namespace

TransferMatrix pointwise_transfer(const FieldVector& b, double B0, double tau) {
  return TransferMatrix(adjoint_rotation(FieldVector(b.x, b.y, b.z + B0), tau).matrix());
}

SMatrix build_s_matrix(const SeparableKernel& k, double B0, double tau, const QuadratureRule& quad) {
  check_normalization(k, quad);
  const auto n = static_cast<Eigen::Index>(k.size());
  SMatrix out;
  out.n = k.size();
  out.B0 = B0;
  out.tau = tau;
  out.s = MatX::Zero(3 * n, 3 * n);
  const double measure = k.support_measure();
  for (const auto& node : quad.nodes) {
    const VecX p = basis_values(k, node.field);
    const Mat3 t = pointwise_transfer(node.field, B0, tau).matrix();
    const double w = measure * node.weight;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        const double pp = w * p[a] * p[b];
        if (pp == 0.0) continue;
        out.s.block<3, 3>(3 * a, 3 * b) += pp * t;
      }
    }
  }
  return out;
}

BoundaryVectors boundary_vectors(const SeparableKernel& k, const BlochVector& s0, double B0, double tau,
                                 const QuadratureRule& quad) {
  check_normalization(k, quad);
  const auto n = static_cast<Eigen::Index>(k.size());
  const double root = std::sqrt(k.support_measure());
  BoundaryVectors bv;
  bv.entry = VecX::Zero(3 * n);
  bv.exit = VecX::Zero(n);
  for (const auto& node : quad.nodes) {
    const VecX p = basis_values(k, node.field);
    const Vec3 ts = pointwise_transfer(node.field, B0, tau).matrix() * s0.vec();
    for (Eigen::Index a = 0; a < n; ++a) {
      bv.exit[a] += root * node.weight * p[a];
      bv.entry.segment<3>(3 * a) += (root * node.weight * p[a]) * ts;
    }
  }
  return bv;
}

double spectral_radius(const SMatrix& s) {
  Eigen::EigenSolver<MatX> es(s.s, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

RelaxationReport asymptotic_rates(const SMatrix& s, double tau, double transient_cut) {
  if (!(transient_cut > 0.0 && transient_cut < 1.0)) {
    throw std::invalid_argument("asymptotic_rates: transient_cut must lie in (0, 1)");
  }
  Eigen::EigenSolver<MatX> es(s.s, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("asymptotic_rates: eigensolver did not converge");
  const auto values = es.eigenvalues();
  const auto vectors = es.eigenvectors();

  struct Item {
    RelaxationMode mode;
    Eigen::VectorXcd vector;
  };
  std::vector<Item> items;
  RelaxationReport rep;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const cd d = values[k];
    Eigen::VectorXcd v = vectors.col(k);
    v /= v.norm();
    RelaxationMode mode;
    if (std::abs(d) >= transient_cut) {
      mode = decay_mode(d, tau);
      const double wz = std::norm(v[2]);
      const double wxy = std::norm(v[0]) + std::norm(v[1]);
      if (wz >= kLabelWeight) {
        mode.label = ModeLabel::Longitudinal;
      } else if (wxy >= kLabelWeight) {
        mode.label = ModeLabel::Transverse;
      } else {
        mode.label = ModeLabel::Ambiguous;
        std::ostringstream os;
        os << "mode d = " << d << " has weight " << wz << " on (1,z) and " << wxy << " on (1,x/y)";
        rep.warnings.push_back(os.str());
      }
    } else {
      mode.eigenvalue = d;
      mode.label = ModeLabel::Transient;
      mode.rate = std::abs(d) > 0.0 ? -std::log(std::abs(d)) / tau : 0.0;
    }
    items.push_back({mode, v});
  }
  if (std::none_of(items.begin(), items.end(), [](const Item& it) { return it.mode.label != ModeLabel::Transient; })) {
    throw NoSurvivingModes("no eigenvalue of S above the transient cut; parameters outside the decoherence limit");
  }

  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    const int ra = rank_of(a.mode.label), rb = rank_of(b.mode.label);
    if (ra != rb) return ra < rb;
    if (std::abs(a.mode.eigenvalue) != std::abs(b.mode.eigenvalue))
      return std::abs(a.mode.eigenvalue) > std::abs(b.mode.eigenvalue);
    return a.mode.eigenvalue.imag() > b.mode.eigenvalue.imag();
  });

  rep.right = Eigen::MatrixXcd(values.size(), values.size());
  rep.damping = DampingClass::Overdamped;
  bool omega_set = false;
  for (std::size_t k = 0; k < items.size(); ++k) {
    rep.modes.push_back(items[k].mode);
    rep.right.col(static_cast<Eigen::Index>(k)) = items[k].vector;
    const auto& m = items[k].mode;
    if (!omega_set && m.label == ModeLabel::Transverse && m.eigenvalue.imag() > 0.0 &&
        std::abs(m.eigenvalue.imag()) >= kRealThreshold * std::max(1.0, std::abs(m.eigenvalue))) {
      rep.omega = std::abs(std::arg(m.eigenvalue)) / tau;
      rep.damping = DampingClass::Underdamped;
      omega_set = true;
    }
  }
  return rep;
}

BlochVector propagate_correlated(const SeparableKernel& k, const BlochVector& s0, int m, double B0, double tau,
                                 const QuadratureRule& quad) {
  if (m < 1) throw std::invalid_argument("propagate_correlated: m must be >= 1");
  const SMatrix s = build_s_matrix(k, B0, tau, quad);
  const BoundaryVectors bv = boundary_vectors(k, s0, B0, tau, quad);
  VecX v = bv.entry;
  for (int step = 1; step < m; ++step) v = s.s * v;
  Vec3 out = Vec3::Zero();
  for (Eigen::Index n = 0; n < bv.exit.size(); ++n) out += bv.exit[n] * v.segment<3>(3 * n);
  return BlochVector(out);
}

}  // namespace decotm
