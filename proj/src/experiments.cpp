#include "decotm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "decotm/correlated.hpp"
#include "decotm/oracles.hpp"
#include "decotm/parallel.hpp"

namespace decotm {

namespace {

constexpr double kTau = 1.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExactRates {
  std::array<cd, 3> d{};
  double rate1 = 0.0;
  double rate2 = 0.0;
  double omega = 0.0;
  DampingClass damping = DampingClass::Underdamped;
};

// Rates of T; a non-diagonalizable T falls back to the bare eigenvalues with the
// one nearest T_zz taken as longitudinal.
ExactRates exact_rates(const IntegralSet& ints) {
  ExactRates out;
  const TransferMatrix t = build_transfer_matrix(ints);
  out.damping = classify_damping(ints);
  try {
    const Spectrum spec = spectral_decompose(t);
    const RelaxationReport rep = relaxation_report(spec, ints.tau);
    out.d = spec.values;
    out.rate1 = rep.longitudinal_rate();
    out.rate2 = rep.transverse_rate();
    out.omega = rep.omega;
  } catch (const DegenerateSpectrum&) {
    auto ev = eigenvalues_3x3(t.matrix()).values;
    const double tzz = t(2, 2);
    std::stable_sort(ev.begin(), ev.end(), [tzz](cd a, cd b) { return std::abs(a - tzz) < std::abs(b - tzz); });
    out.d = ev;
    out.rate1 = decay_mode(ev[0], ints.tau).rate;
    out.rate2 = decay_mode(ev[1], ints.tau).rate;
    out.omega = std::abs(std::arg(ev[1])) / ints.tau;
  }
  return out;
}

void check_bound(const std::array<cd, 3>& d, const std::string& where) {
  for (const cd v : d) {
    if (!(std::abs(v) <= 1.0 + kEigenvalueBound)) {
      std::ostringstream os;
      os << "eigenvalue bound violated at " << where << ": |d| = " << format_double(std::abs(v));
      throw InvariantBreach(os.str());
    }
  }
}

NoiseDistribution fig12_distribution(const std::string& family, double b0) {
  if (family == "planar_ring") return NoiseDistribution::planar_ring(b0);
  if (family == "sphere_shell") return NoiseDistribution::sphere_shell(b0);
  throw ConfigError("fig12 family must be planar_ring or sphere_shell, got '" + family + "'");
}

void axis_flip_components(double b0, double anisotropy, double& bx, double& by) {
  bx = b0 * std::sqrt(0.5 * (1.0 + anisotropy));
  by = b0 * std::sqrt(std::max(0.0, 0.5 * (1.0 - anisotropy)));
}

double relative_residual(const IntegralSet& ints) {
  const double a = 4.0 * ints.i[2] * ints.i[2];
  const double diff = ints.ij(0, 0) - ints.ij(1, 1);
  const double b = diff * diff;
  const double scale = std::max(a, b);
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

IntegralSet transition_integrals(double B0, double b0, double anisotropy, double tau) {
  double bx = 0.0, by = 0.0;
  axis_flip_components(b0, anisotropy, bx, by);
  const auto dist = NoiseDistribution::axis_flip(bx, by, 0.0);
  return compute_integrals(dist, B0, tau, quadrature(dist));
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---------------------------------------------------------------------------

SweepResult run_fig12_sweep(const SweepConfig& cfg, int threads) {
  validate(cfg);
  const auto ratios = cfg.b0_over_B0.points();
  struct Point {
    double B0_tau;
    double ratio;
  };
  std::vector<Point> grid;
  for (double B0 : cfg.B0_tau)
    for (double ratio : ratios) grid.push_back({B0, ratio});

  SweepResult res;
  res.rows.resize(grid.size());
  parallel_for(grid.size(), resolve_threads(threads), [&](std::size_t k) {
    const double B0 = grid[k].B0_tau;
    const double b0 = grid[k].ratio * B0;
    const auto dist = fig12_distribution(cfg.family, b0);
    const MomentSet mom = moments(dist);
    const IntegralSet ints = compute_integrals(dist, B0, kTau, quadrature(dist, cfg.quad_order));
    const ExactRates ex = exact_rates(ints);
    std::ostringstream where;
    where << cfg.family << " B0_tau=" << format_double(B0) << " b0_over_B0=" << format_double(grid[k].ratio);
    check_bound(ex.d, where.str());

    // Ring rows are normalized by the total second moment, sphere rows by the in-plane one.
    const bool ring = cfg.family == "planar_ring";
    const double norm = (ring ? mom.total_second() : mom.planar_second()) * kTau;
    const double alt = (ring ? mom.planar_second() : mom.total_second()) * kTau;

    SweepRow& row = res.rows[k];
    row.family = cfg.family;
    row.B0_tau = B0 * kTau;
    row.b0_over_B0 = grid[k].ratio;
    row.r = 0.0;
    row.rate1 = ex.rate1;
    row.rate2 = ex.rate2;
    row.rate1_norm = ex.rate1 / norm;
    row.rate2_norm = ex.rate2 / norm;
    row.rate1_norm_alt = ex.rate1 / alt;
    row.rate2_norm_alt = ex.rate2 / alt;
    row.omega_precession = ex.omega;
    row.damping_class = to_string(ex.damping);
    for (std::size_t i = 0; i < 3; ++i) row.d_abs[i] = std::abs(ex.d[i]);
    row.seed = cfg.seed;
  });
  return res;
}

SweepResult run_fig3_sweep(const SweepConfig& cfg, int threads) {
  validate(cfg);
  const double B0 = cfg.B0_tau.front();
  const double b0 = cfg.b0_tau.front();
  SweepResult res;
  if (!(b0 <= 0.2 * B0 && B0 <= 0.2)) {
    std::ostringstream os;
    os << "b0_tau=" << format_double(b0) << ", B0_tau=" << format_double(B0)
       << " is outside the decoherence limit b0_tau << B0_tau << 1; rates may not be asymptotic";
    res.warnings.push_back(os.str());
  }
  const auto rs = cfg.r.points();
  res.rows.resize(rs.size());
  std::vector<std::vector<std::string>> row_warnings(rs.size());
  const auto quad = quadrature(NoiseDistribution::planar_ring(b0), cfg.quad_order);
  const double norm = b0 * b0 * kTau;

  parallel_for(rs.size(), resolve_threads(threads), [&](std::size_t k) {
    const auto kernel = SeparableKernel::sp_wave_mixture(b0, rs[k]);
    const SMatrix s = build_s_matrix(kernel, B0, kTau, quad);
    SweepRow& row = res.rows[k];
    row.family = kernel.family();
    row.B0_tau = B0 * kTau;
    row.b0_over_B0 = b0 / B0;
    row.r = rs[k];
    row.seed = cfg.seed;
    const double radius = spectral_radius(s);
    if (!(radius <= 1.0 + kEigenvalueBound)) {
      throw InvariantBreach("S spectral radius " + format_double(radius) + " exceeds one at r=" + format_double(rs[k]));
    }
    try {
      const RelaxationReport rep = asymptotic_rates(s, kTau, cfg.transient_cut);
      row.rate1 = rep.longitudinal_rate();
      row.rate2 = rep.transverse_rate();
      row.omega_precession = rep.omega;
      row.damping_class = to_string(rep.damping);
      for (std::size_t i = 0; i < 3; ++i) row.d_abs[i] = i < rep.modes.size() ? std::abs(rep.modes[i].eigenvalue) : 0.0;
      for (const auto& w : rep.warnings) row_warnings[k].push_back("r=" + format_double(rs[k]) + ": " + w);
    } catch (const NoSurvivingModes& e) {
      row.rate1 = row.rate2 = row.omega_precession = kNaN;
      row.damping_class = "transient_cut_failure";
      row.d_abs = {kNaN, kNaN, kNaN};
      row_warnings[k].push_back("r=" + format_double(rs[k]) + ": " + e.what());
    }
    row.rate1_norm = row.rate1 / norm;
    row.rate2_norm = row.rate2 / norm;
    row.rate1_norm_alt = row.rate1_norm;
    row.rate2_norm_alt = row.rate2_norm;
  });
  for (auto& w : row_warnings) res.warnings.insert(res.warnings.end(), w.begin(), w.end());
  return res;
}

// ---------------------------------------------------------------------------

TransitionRow transition_point(double B0, double b0, double anisotropy, double tau) {
  TransitionRow row;
  row.anisotropy = anisotropy;
  axis_flip_components(b0, anisotropy, row.bx, row.by);
  const IntegralSet ints = transition_integrals(B0, b0, anisotropy, tau);
  row.discriminant = damping_discriminant(ints);
  const ExactRates ex = exact_rates(ints);
  row.damping_class = to_string(ex.damping);
  row.d = ex.d;
  row.rate1 = ex.rate1;
  row.rate2 = ex.rate2;
  row.omega_precession = ex.omega;
  return row;
}

TransitionResult run_transition_scan(const SweepConfig& cfg, int threads) {
  validate(cfg);
  TransitionResult res;
  res.B0_tau = cfg.B0_tau.front();
  res.b0_tau = cfg.b0_tau.front();
  res.seed = cfg.seed;
  const double B0 = res.B0_tau / kTau;
  const double b0 = res.b0_tau / kTau;
  const auto grid = cfg.anisotropy.points();
  res.rows.resize(grid.size());
  parallel_for(grid.size(), resolve_threads(threads), [&](std::size_t k) {
    res.rows[k] = transition_point(B0, b0, grid[k], kTau);
    check_bound(res.rows[k].d, "anisotropy=" + format_double(grid[k]));
  });

  // First sign change of the discriminant along the grid.
  std::optional<std::size_t> bracket;
  for (std::size_t k = 0; k + 1 < res.rows.size(); ++k) {
    if (res.rows[k].discriminant > 0.0 && res.rows[k + 1].discriminant <= 0.0) {
      bracket = k;
      break;
    }
  }
  if (!bracket) {
    res.warnings.push_back("no underdamped-to-overdamped crossing inside the scanned anisotropy range");
    return res;
  }
  double lo = grid[*bracket];
  double hi = grid[*bracket + 1];
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (damping_discriminant(transition_integrals(B0, b0, mid, kTau)) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double a_lo = relative_residual(transition_integrals(B0, b0, lo, kTau));
  const double a_hi = relative_residual(transition_integrals(B0, b0, hi, kTau));
  const double located = a_lo <= a_hi ? lo : hi;
  res.boundary = located;
  res.boundary_residual = std::min(a_lo, a_hi);
  TransitionRow brow = transition_point(B0, b0, located, kTau);
  brow.is_boundary = true;
  const auto pos = std::upper_bound(res.rows.begin(), res.rows.end(), located,
                                    [](double a, const TransitionRow& r) { return a < r.anisotropy; });
  res.rows.insert(pos, brow);
  return res;
}

// ---------------------------------------------------------------------------

double VerifyCheck::discrepancy() const { return std::abs(observed - expected); }

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

std::vector<VerifyCheck> VerifyReport::failures() const {
  std::vector<VerifyCheck> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out), [](const VerifyCheck& c) { return !c.pass; });
  return out;
}

NoiseDistribution verify_distribution(const std::string& family, double b0) {
  if (family == "planar_ring") return NoiseDistribution::planar_ring(b0);
  if (family == "sphere_shell") return NoiseDistribution::sphere_shell(b0);
  if (family == "planar_anisotropic") return NoiseDistribution::planar_anisotropic(b0, 0.5);
  if (family == "axis_flip") return NoiseDistribution::axis_flip(b0 * std::sqrt(0.75), b0 * std::sqrt(0.25), 0.0);
  if (family == "point") return NoiseDistribution::point(FieldVector(b0 * std::sqrt(0.5), 0.0, b0 * std::sqrt(0.5)));
  throw ConfigError("unknown family '" + family + "'");
}

namespace {

struct CheckContext {
  std::string family;
  double B0_tau = 0.0;
  double b0_tau = 0.0;
  double r = 0.0;
};

class Recorder {
 public:
  explicit Recorder(VerifyReport& rep) : rep_(rep) {}

  void absolute(const CheckContext& ctx, const std::string& check, const std::string& comp, double obs, double exp,
                double tol) {
    push(ctx, check, comp, obs, exp, tol, std::abs(obs - exp) <= tol);
  }

  void relative(const CheckContext& ctx, const std::string& check, const std::string& comp, double obs, double exp,
                double rel) {
    const double tol = rel * std::abs(exp);
    push(ctx, check, comp, obs, exp, tol, std::abs(obs - exp) <= tol);
  }

  void upper(const CheckContext& ctx, const std::string& check, const std::string& comp, double obs, double bound,
             double tol) {
    push(ctx, check, comp, obs, bound, tol, obs <= bound + tol);
  }

 private:
  void push(const CheckContext& ctx, const std::string& check, const std::string& comp, double obs, double exp,
            double tol, bool pass) {
    rep_.checks.push_back({check, ctx.family, ctx.B0_tau, ctx.b0_tau, ctx.r, comp, obs, exp, tol, pass && std::isfinite(obs)});
  }

  VerifyReport& rep_;
};

const char* kAxes[3] = {"x", "y", "z"};

void record_monte_carlo(Recorder& rec, const CheckContext& ctx, const std::string& check, const MonteCarloResult& mc,
                        const BlochVector& exact) {
  for (int i = 0; i < 3; ++i) {
    rec.absolute(ctx, check, kAxes[i], mc.mean[i], exact[i], 3.0 * mc.standard_error[i]);
  }
}

void verify_white(Recorder& rec, const SweepConfig& cfg, const std::string& family, double B0, double b0,
                  std::uint64_t seed, int threads) {
  const CheckContext ctx{family, B0 * kTau, b0 * kTau, 0.0};
  const auto dist = verify_distribution(family, b0);
  const auto quad = quadrature(dist, cfg.quad_order);

  IntegralSet ints;
  try {
    ints = compute_integrals(dist, B0, kTau, quad);
  } catch (const SumRuleViolation&) {
    ints = IntegralSet{};
    rec.absolute(ctx, "sum_rule", "I0+tr", kNaN, 1.0, 1e-12);
    return;
  }
  rec.absolute(ctx, "sum_rule", "I0+tr", ints.i0 + ints.ij.trace(), 1.0, 1e-12);

  const MomentSet exact_mom = moments(dist);
  const MomentSet quad_mom = quadrature_moments(quad);
  const double s2 = 1e-9 * std::max(b0 * b0, 1e-300);
  const double s4 = 1e-9 * std::max(b0 * b0 * b0 * b0, 1e-300);
  for (int i = 0; i < 3; ++i) {
    rec.absolute(ctx, "quadrature_moment", std::string("second_") + kAxes[i], quad_mom.second[i], exact_mom.second[i], s2);
    rec.absolute(ctx, "quadrature_moment", std::string("fourth_") + kAxes[i], quad_mom.fourth[i], exact_mom.fourth[i], s4);
  }
  rec.absolute(ctx, "quadrature_moment", "xy", quad_mom.xy, exact_mom.xy, s4);
  rec.absolute(ctx, "quadrature_moment", "xz", quad_mom.xz, exact_mom.xz, s4);
  rec.absolute(ctx, "quadrature_moment", "yz", quad_mom.yz, exact_mom.yz, s4);

  const TransferMatrix t = build_transfer_matrix(ints);
  const ExactRates ex = exact_rates(ints);
  double dmax = 0.0;
  for (const cd d : ex.d) dmax = std::max(dmax, std::abs(d));
  rec.upper(ctx, "eigenvalue_bound", "max_abs_d", dmax, 1.0, 1e-10);

  const BlochVector s0(Vec3(1.0, 1.0, 1.0) / std::sqrt(3.0));
  const BlochVector direct = propagate_direct(t, s0, cfg.m);
  try {
    const BlochVector spectral = propagate(spectral_decompose(t), s0, cfg.m);
    for (int i = 0; i < 3; ++i) rec.absolute(ctx, "spectral_vs_direct", kAxes[i], spectral[i], direct[i], 1e-9);
  } catch (const DegenerateSpectrum&) {
  }

  const MonteCarloResult mc = monte_carlo_white(dist, B0, kTau, cfg.m, s0, cfg.trajectories, seed, threads);
  record_monte_carlo(rec, ctx, "monte_carlo", mc, direct);

  if (family == "point" || b0 <= 0.0) return;
  if (B0 * kTau <= 0.1 && b0 <= 0.1 * B0) {
    const PerturbativeRates pr = redfield_rates(dist, B0, kTau);
    rec.relative(ctx, "redfield", "rate1", ex.rate1, pr.rate1, 0.05);
    rec.relative(ctx, "redfield", "rate2", ex.rate2, pr.rate2, 0.05);
  }
  if (B0 * kTau <= 0.1 && b0 * kTau <= 0.1) {
    const SeriesRates sr = series_rates(exact_mom, B0, kTau);
    rec.relative(ctx, "series", "rate1", ex.rate1, sr.rate1, 0.02);
    rec.relative(ctx, "series", "rate2", ex.rate2, sr.rate2, 0.02);
  }
}

void verify_correlated(Recorder& rec, const SweepConfig& cfg, double B0, double b0, double r, std::uint64_t seed,
                       int threads) {
  const CheckContext ctx{"sp_wave", B0 * kTau, b0 * kTau, r};
  const auto kernel = SeparableKernel::sp_wave_mixture(b0, r);
  const auto quad = quadrature(kernel.support(), std::max(cfg.quad_order, 2));
  const BlochVector s0(Vec3(1.0, 1.0, 1.0) / std::sqrt(3.0));
  const int m = std::max(cfg.m, 1);
  const BlochVector exact = propagate_correlated(kernel, s0, m, B0, kTau, quad);
  const MonteCarloResult mc = monte_carlo_correlated(kernel, B0, kTau, m, s0, cfg.trajectories, seed, threads);
  record_monte_carlo(rec, ctx, "monte_carlo_correlated", mc, exact);
}

}  // namespace

VerifyReport run_verify(const SweepConfig& cfg, int threads) {
  validate(cfg);
  const int workers = resolve_threads(threads);
  VerifyReport rep;
  Recorder rec(rep);
  std::uint64_t stream = 0;
  auto next_seed = [&] { return cfg.seed + 0x9E3779B97F4A7C15ULL * ++stream; };
  for (double B0_tau : cfg.B0_tau) {
    for (double b0_tau : cfg.b0_tau) {
      const double B0 = B0_tau / kTau;
      const double b0 = b0_tau / kTau;
      for (const auto& family : cfg.families) verify_white(rec, cfg, family, B0, b0, next_seed(), workers);
      for (double r : cfg.correlated_r) verify_correlated(rec, cfg, B0, b0, r, next_seed(), workers);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

void write_sweep_csv(std::ostream& os, const SweepResult& res) {
  os << "family,B0_tau,b0_over_B0,r,rate1_norm,rate2_norm,rate1,rate2,omega_precession,damping_class,"
        "d1_abs,d2_abs,d3_abs,seed,rate1_norm_alt,rate2_norm_alt\n";
  for (const auto& r : res.rows) {
    os << r.family << ',' << format_double(r.B0_tau) << ',' << format_double(r.b0_over_B0) << ','
       << format_double(r.r) << ',' << format_double(r.rate1_norm) << ',' << format_double(r.rate2_norm) << ','
       << format_double(r.rate1) << ',' << format_double(r.rate2) << ',' << format_double(r.omega_precession) << ','
       << r.damping_class << ',' << format_double(r.d_abs[0]) << ',' << format_double(r.d_abs[1]) << ','
       << format_double(r.d_abs[2]) << ',' << r.seed << ',' << format_double(r.rate1_norm_alt) << ','
       << format_double(r.rate2_norm_alt) << '\n';
  }
}

void write_transition_csv(std::ostream& os, const TransitionResult& res) {
  os << "family,B0_tau,b0_tau,anisotropy,bx,by,discriminant,damping_class,d1_re,d1_im,d2_re,d2_im,d3_re,d3_im,"
        "rate1,rate2,omega_precession,is_boundary,seed\n";
  for (const auto& r : res.rows) {
    os << res.family << ',' << format_double(res.B0_tau) << ',' << format_double(res.b0_tau) << ','
       << format_double(r.anisotropy) << ',' << format_double(r.bx) << ',' << format_double(r.by) << ','
       << format_double(r.discriminant) << ',' << r.damping_class;
    for (const cd d : r.d) os << ',' << format_double(d.real()) << ',' << format_double(d.imag());
    os << ',' << format_double(r.rate1) << ',' << format_double(r.rate2) << ',' << format_double(r.omega_precession)
       << ',' << (r.is_boundary ? 1 : 0) << ',' << res.seed << '\n';
  }
}

void write_verify_csv(std::ostream& os, const VerifyReport& rep) {
  os << "check,family,B0_tau,b0_tau,r,component,observed,expected,tolerance,discrepancy,status\n";
  for (const auto& c : rep.checks) {
    os << c.check << ',' << c.family << ',' << format_double(c.B0_tau) << ',' << format_double(c.b0_tau) << ','
       << format_double(c.r) << ',' << c.component << ',' << format_double(c.observed) << ','
       << format_double(c.expected) << ',' << format_double(c.tolerance) << ',' << format_double(c.discrepancy())
       << ',' << (c.pass ? "pass" : "FAIL") << '\n';
  }
}

void write_verify_text(std::ostream& os, const VerifyReport& rep) {
  for (const auto& c : rep.checks) {
    os << (c.pass ? "ok   " : "FAIL ") << c.check << ' ' << c.family << " B0_tau=" << format_double(c.B0_tau)
       << " b0_tau=" << format_double(c.b0_tau);
    if (c.family == "sp_wave") os << " r=" << format_double(c.r);
    os << ' ' << c.component << ": observed " << format_double(c.observed) << ", expected "
       << format_double(c.expected) << ", |diff| " << format_double(c.discrepancy()) << ", tolerance "
       << format_double(c.tolerance) << '\n';
  }
  const auto failed = rep.failures();
  os << rep.checks.size() - failed.size() << '/' << rep.checks.size() << " checks passed\n";
}

std::string gnuplot_stub(const std::string& section, const std::string& csv_path) {
  std::ostringstream os;
  os << "set datafile separator ','\nset key autotitle columnhead\n";
  if (section == "fig12") {
    os << "set logscale x\nset xlabel 'b0/B0'\nset ylabel 'normalized rate'\n"
       << "plot '" << csv_path << "' using 3:5 with linespoints title '1/T1', \\\n"
       << "     '" << csv_path << "' using 3:6 with linespoints title '1/T2'\n";
  } else if (section == "fig3") {
    os << "set xlabel 'r'\nset ylabel 'normalized rate'\n"
       << "plot '" << csv_path << "' using 4:5 with linespoints title '1/T1', \\\n"
       << "     '" << csv_path << "' using 4:6 with linespoints title '1/T2'\n";
  } else if (section == "transition") {
    os << "set xlabel 'anisotropy'\nset ylabel 'Im d'\n"
       << "plot '" << csv_path << "' using 4:11 with linespoints title 'Im d2', \\\n"
       << "     '" << csv_path << "' using 4:13 with linespoints title 'Im d3'\n";
  } else {
    os << "# verify emits a tabular report; nothing to plot\n";
  }
  return os.str();
}

}  // namespace decotm
