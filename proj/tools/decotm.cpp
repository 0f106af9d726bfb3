// decotm: figure sweeps, transition scan and oracle verification.
//
//   decotm fig12 --config configs/fig1.conf --out fig1.csv
//   decotm verify --config configs/verify.conf --threads 0
//
// Exit status: 0 success, 2 configuration error, 3 verification failure,
// 4 numerical invariant breach.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "decotm/config.hpp"
#include "decotm/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;
constexpr int kExitInvariant = 4;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string gnuplot;
};

int threads_from(const Options& opt) {
  if (opt.threads) return *opt.threads;
  if (const char* env = std::getenv("DECOTM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n < 0) throw std::out_of_range("negative");
      return n;
    } catch (const std::exception&) {
      throw decotm::ConfigError(std::string("DECOTM_THREADS must be a nonnegative integer, got '") + env + "'");
    }
  }
  return 1;
}

// Writes to --out, then the config's output key, then stdout.
template <class Writer>
void emit(const decotm::SweepConfig& cfg, const Options& opt, Writer&& write) {
  const std::string path = !opt.out.empty() ? opt.out : cfg.output;
  if (path.empty() || path == "-") {
    write(std::cout);
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw decotm::ConfigError("cannot open output file '" + path + "'");
    write(f);
    if (!f) throw decotm::ConfigError("failed writing '" + path + "'");
  }
  if (!opt.gnuplot.empty()) {
    std::ofstream g(opt.gnuplot);
    if (!g) throw decotm::ConfigError("cannot open gnuplot file '" + opt.gnuplot + "'");
    g << decotm::gnuplot_stub(cfg.section, path.empty() ? "-" : path);
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run(const std::string& section, const Options& opt) {
  decotm::SweepConfig cfg =
      opt.config.empty() ? decotm::default_config(section) : decotm::load_config(opt.config, section);
  if (opt.seed) cfg.seed = *opt.seed;
  decotm::validate(cfg);
  const int threads = threads_from(opt);

  if (section == "fig12" || section == "fig3") {
    const auto res = section == "fig12" ? decotm::run_fig12_sweep(cfg, threads) : decotm::run_fig3_sweep(cfg, threads);
    print_warnings(res.warnings);
    emit(cfg, opt, [&](std::ostream& os) { decotm::write_sweep_csv(os, res); });
    return 0;
  }
  if (section == "transition") {
    const auto res = decotm::run_transition_scan(cfg, threads);
    print_warnings(res.warnings);
    if (res.boundary) {
      std::cerr << "boundary at anisotropy " << decotm::format_double(*res.boundary) << ", relative residual "
                << decotm::format_double(res.boundary_residual) << '\n';
    }
    emit(cfg, opt, [&](std::ostream& os) { decotm::write_transition_csv(os, res); });
    return 0;
  }
  const auto rep = decotm::run_verify(cfg, threads);
  print_warnings(rep.warnings);
  const bool to_stdout = opt.out.empty() && cfg.output.empty();
  decotm::write_verify_text(to_stdout ? std::cerr : std::cout, rep);
  emit(cfg, opt, [&](std::ostream& os) { decotm::write_verify_csv(os, rep); });
  return rep.passed() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit decoherence under piecewise-constant random fields"};
  app.require_subcommand(1);
  Options opt;
  const std::pair<const char*, const char*> commands[] = {
      {"fig12", "Exact T1/T2 rates versus b0/B0 for ring or sphere noise"},
      {"fig3", "Asymptotic rates versus correlation r for the s/p-wave kernel"},
      {"transition", "Anisotropy scan locating the overdamped transition"},
      {"verify", "Cross-check exact solvers against Monte Carlo and perturbative oracles"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output CSV path ('-' for stdout)");
    sub->add_option("--seed", opt.seed, "Master seed (overrides the config)");
    sub->add_option("--threads", opt.threads, "Worker threads, 0 = one per core (default: DECOTM_THREADS or 1)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--gnuplot", opt.gnuplot, "Also write a gnuplot script for the CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string section = app.get_subcommands().front()->get_name();
  try {
    return run(section, opt);
  } catch (const decotm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const decotm::InvariantBreach& e) {
    std::cerr << "invariant breach: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
