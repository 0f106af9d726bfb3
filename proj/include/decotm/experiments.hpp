#pragma once

// Figure sweeps, the overdamped-transition scan and the cross-oracle verify
// run. Every sweep uses tau = 1, so B0 = B0_tau and b0 = b0_tau numerically.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decotm/config.hpp"
#include "decotm/transfer.hpp"

namespace decotm {

/// An emitted eigenvalue left the unit disk.
class InvariantBreach : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kEigenvalueBound = 1e-9;

struct SweepRow {
  std::string family;
  double B0_tau = 0.0;
  double b0_over_B0 = 0.0;
  double r = 0.0;
  double rate1_norm = 0.0;
  double rate2_norm = 0.0;
  double rate1 = 0.0;
  double rate2 = 0.0;
  double omega_precession = 0.0;
  std::string damping_class;
  std::array<double, 3> d_abs{};
  std::uint64_t seed = 0;
  // Same rates under the other normalization (total vs in-plane second moment).
  double rate1_norm_alt = 0.0;
  double rate2_norm_alt = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

SweepResult run_fig12_sweep(const SweepConfig& cfg, int threads = 1);
SweepResult run_fig3_sweep(const SweepConfig& cfg, int threads = 1);

struct TransitionRow {
  double anisotropy = 0.0;  // (bx^2 - by^2) / (bx^2 + by^2)
  double bx = 0.0;
  double by = 0.0;
  double discriminant = 0.0;  // 4 Iz^2 - (Ixx - Iyy)^2
  std::string damping_class;
  std::array<cd, 3> d{};
  double rate1 = 0.0;
  double rate2 = 0.0;
  double omega_precession = 0.0;
  bool is_boundary = false;
};

struct TransitionResult {
  std::string family = "axis_flip";
  double B0_tau = 0.0;
  double b0_tau = 0.0;
  std::uint64_t seed = 0;
  std::vector<TransitionRow> rows;  // grid order, located boundary inserted in place
  std::optional<double> boundary;
  double boundary_residual = 0.0;  // |4Iz^2 - (Ixx-Iyy)^2| / max(4Iz^2, (Ixx-Iyy)^2)
  std::vector<std::string> warnings;
};

/// Anisotropy sweep of AxisFlip noise at constant bx^2 + by^2 = b0^2.
TransitionResult run_transition_scan(const SweepConfig& cfg, int threads = 1);

/// One transition row at a given anisotropy in [0, 1].
TransitionRow transition_point(double B0, double b0, double anisotropy, double tau = 1.0);

struct VerifyCheck {
  std::string check;
  std::string family;
  double B0_tau = 0.0;
  double b0_tau = 0.0;
  double r = 0.0;
  std::string component;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  double discrepancy() const;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  std::vector<std::string> warnings;

  bool passed() const;
  std::vector<VerifyCheck> failures() const;
};

/// Builds the family used by verify at field scale b0 ("planar_ring", "sphere_shell",
/// "planar_anisotropic", "axis_flip", "point").
NoiseDistribution verify_distribution(const std::string& family, double b0);

VerifyReport run_verify(const SweepConfig& cfg, int threads = 1);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

void write_sweep_csv(std::ostream& os, const SweepResult& res);
void write_transition_csv(std::ostream& os, const TransitionResult& res);
void write_verify_csv(std::ostream& os, const VerifyReport& rep);

/// Human-readable summary, one line per check; failures carry observed, expected and tolerance.
void write_verify_text(std::ostream& os, const VerifyReport& rep);

/// Minimal gnuplot script that plots `csv_path` for the given subcommand.
std::string gnuplot_stub(const std::string& section, const std::string& csv_path);

}  // namespace decotm
