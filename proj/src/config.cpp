#include "decotm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace decotm {

namespace {

const std::set<std::string> kSections{"fig12", "fig3", "transition", "verify"};
const std::set<std::string> kFamilies{"planar_ring", "sphere_shell", "planar_anisotropic", "axis_flip", "point"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail(line, "not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& s, int line) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(line, "not an integer: '" + s + "'");
  return v;
}

std::vector<double> to_doubles(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(item, line));
  if (out.empty()) fail(line, "empty list");
  return out;
}

Spacing to_spacing(const std::string& s, int line) {
  if (s == "log") return Spacing::Log;
  if (s == "linear") return Spacing::Linear;
  fail(line, "spacing must be 'log' or 'linear', got '" + s + "'");
}

using Setter = std::function<void(SweepConfig&, const std::string&, int)>;

void add_grid(std::map<std::string, Setter>& keys, const std::string& name, Grid SweepConfig::*grid) {
  keys[name + "_min"] = [grid](SweepConfig& c, const std::string& v, int l) { (c.*grid).min = to_double(v, l); };
  keys[name + "_max"] = [grid](SweepConfig& c, const std::string& v, int l) { (c.*grid).max = to_double(v, l); };
  keys[name + "_count"] = [grid](SweepConfig& c, const std::string& v, int l) {
    (c.*grid).count = static_cast<int>(to_integer(v, l));
  };
  keys[name + "_spacing"] = [grid](SweepConfig& c, const std::string& v, int l) {
    (c.*grid).spacing = to_spacing(v, l);
  };
}

std::map<std::string, Setter> keys_for(const std::string& section) {
  std::map<std::string, Setter> keys;
  keys["seed"] = [](SweepConfig& c, const std::string& v, int l) {
    const long long s = to_integer(v, l);
    if (s < 0) fail(l, "seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  };
  keys["output"] = [](SweepConfig& c, const std::string& v, int) { c.output = v; };
  keys["B0_tau"] = [](SweepConfig& c, const std::string& v, int l) { c.B0_tau = to_doubles(v, l); };

  if (section != "transition") {
    keys["quad_order"] = [](SweepConfig& c, const std::string& v, int l) {
      c.quad_order = static_cast<int>(to_integer(v, l));
    };
  }
  if (section == "fig12") {
    keys["family"] = [](SweepConfig& c, const std::string& v, int l) {
      if (v != "planar_ring" && v != "sphere_shell") fail(l, "fig12 family must be planar_ring or sphere_shell");
      c.family = v;
    };
    add_grid(keys, "b0_over_B0", &SweepConfig::b0_over_B0);
  } else {
    keys["b0_tau"] = [](SweepConfig& c, const std::string& v, int l) { c.b0_tau = to_doubles(v, l); };
  }
  if (section == "fig3") {
    add_grid(keys, "r", &SweepConfig::r);
    keys["transient_cut"] = [](SweepConfig& c, const std::string& v, int l) { c.transient_cut = to_double(v, l); };
  }
  if (section == "transition") add_grid(keys, "anisotropy", &SweepConfig::anisotropy);
  if (section == "verify") {
    keys["families"] = [](SweepConfig& c, const std::string& v, int l) {
      c.families = split_list(v);
      if (c.families.empty()) fail(l, "empty family list");
      for (const auto& f : c.families)
        if (!kFamilies.count(f)) fail(l, "unknown family '" + f + "'");
    };
    keys["m"] = [](SweepConfig& c, const std::string& v, int l) { c.m = static_cast<int>(to_integer(v, l)); };
    keys["trajectories"] = [](SweepConfig& c, const std::string& v, int l) {
      const long long n = to_integer(v, l);
      if (n < 1) fail(l, "trajectories must be >= 1");
      c.trajectories = static_cast<std::size_t>(n);
    };
    keys["correlated_r"] = [](SweepConfig& c, const std::string& v, int l) {
      c.correlated_r = split_list(v).empty() ? std::vector<double>{} : to_doubles(v, l);
    };
  }
  return keys;
}

void check_grid(const Grid& g, const std::string& name) {
  if (g.count < 1) fail(0, name + "_count must be >= 1");
  if (g.min < 0.0 || g.max < g.min) fail(0, name + " grid needs 0 <= min <= max");
  if (g.spacing == Spacing::Log && g.min <= 0.0) fail(0, name + " log grid needs min > 0");
}

}  // namespace

std::vector<double> Grid::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    if (spacing == Spacing::Log) {
      out.push_back(std::exp(std::log(min) + f * (std::log(max) - std::log(min))));
    } else {
      out.push_back(min + f * (max - min));
    }
  }
  if (count > 1) out.back() = max;
  return out;
}

SweepConfig default_config(const std::string& section) {
  if (!kSections.count(section)) throw ConfigError("unknown section '" + section + "'");
  SweepConfig c;
  c.section = section;
  if (section == "fig12") {
    c.B0_tau = {0.1, 1.0, 10.0};
  } else if (section == "fig3") {
    c.B0_tau = {0.05};
    c.b0_tau = {0.005};
  } else if (section == "transition") {
    c.B0_tau = {0.01};
    c.b0_tau = {0.5};
  } else {
    c.B0_tau = {0.05, 0.5};
    c.b0_tau = {0.005, 0.05};
  }
  return c;
}

SweepConfig parse_config(const std::string& text, const std::string& section) {
  SweepConfig cfg = default_config(section);
  std::map<std::string, std::map<std::string, Setter>> all;
  for (const auto& s : kSections) all[s] = keys_for(s);

  std::istringstream in(text);
  std::string raw;
  std::string current;
  std::set<std::string> seen;
  int line = 0;
  SweepConfig scratch;  // sink for sections other than the requested one
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']') fail(line, "malformed section header");
      current = trim(content.substr(1, content.size() - 2));
      if (!kSections.count(current)) fail(line, "unknown section [" + current + "]");
      seen.clear();
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    if (current.empty()) fail(line, "key outside of a [section]");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto& keys = all[current];
    const auto it = keys.find(key);
    if (it == keys.end()) fail(line, "unknown key '" + key + "' in [" + current + "]");
    if (!seen.insert(key).second) fail(line, "duplicate key '" + key + "'");
    if (value.empty() && key != "correlated_r") fail(line, "missing value for '" + key + "'");
    it->second(current == section ? cfg : scratch, value, line);
  }
  validate(cfg);
  return cfg;
}

SweepConfig load_config(const std::string& path, const std::string& section) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), section);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate(const SweepConfig& c) {
  auto nonneg = [](const std::vector<double>& v, const std::string& name) {
    if (v.empty()) fail(0, name + " must not be empty");
    for (double x : v)
      if (!(x >= 0.0)) fail(0, name + " values must be >= 0");
  };
  nonneg(c.B0_tau, "B0_tau");
  nonneg(c.b0_tau, "b0_tau");
  if (c.quad_order < 1) fail(0, "quad_order must be >= 1");
  if (c.section == "fig12") {
    check_grid(c.b0_over_B0, "b0_over_B0");
    if (c.b0_over_B0.min <= 0.0) fail(0, "b0_over_B0_min must be > 0");
    for (double x : c.B0_tau)
      if (x <= 0.0) fail(0, "fig12 needs B0_tau > 0");
  }
  if (c.section == "fig3") {
    check_grid(c.r, "r");
    if (c.r.max > 1.0) fail(0, "r must lie in [0, 1]");
    if (!(c.transient_cut > 0.0 && c.transient_cut < 1.0)) fail(0, "transient_cut must lie in (0, 1)");
    if (c.B0_tau.size() != 1 || c.b0_tau.size() != 1) fail(0, "fig3 takes a single B0_tau and b0_tau");
    if (c.b0_tau[0] <= 0.0) fail(0, "fig3 needs b0_tau > 0");
    if (c.quad_order < 2) fail(0, "fig3 needs quad_order >= 2 to resolve the p-wave basis");
  }
  if (c.section == "transition") {
    check_grid(c.anisotropy, "anisotropy");
    if (c.anisotropy.max > 1.0) fail(0, "anisotropy must lie in [0, 1]");
    if (c.B0_tau.size() != 1 || c.b0_tau.size() != 1) fail(0, "transition takes a single B0_tau and b0_tau");
  }
  if (c.section == "verify") {
    if (c.m < 0) fail(0, "m must be >= 0");
    if (c.trajectories < 1) fail(0, "trajectories must be >= 1");
    for (double r : c.correlated_r)
      if (r < 0.0 || r > 1.0) fail(0, "correlated_r must lie in [0, 1]");
  }
}

}  // namespace decotm
