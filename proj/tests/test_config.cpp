#include <fstream>

#include "decotm/config.hpp"
#include "doctest.h"

using namespace decotm;

namespace {

std::string error_of(const std::string& text, const std::string& section) {
  try {
    parse_config(text, section);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("grid points") {
  const auto lin = Grid{0.0, 1.0, 5, Spacing::Linear}.points();
  REQUIRE(lin.size() == 5);
  CHECK(lin[2] == doctest::Approx(0.5));
  CHECK(lin.back() == 1.0);
  const auto lg = Grid{0.1, 10.0, 3, Spacing::Log}.points();
  CHECK(lg[0] == doctest::Approx(0.1));
  CHECK(lg[1] == doctest::Approx(1.0));
  CHECK(lg[2] == 10.0);
  CHECK(Grid{2.0, 2.0, 1, Spacing::Linear}.points() == std::vector<double>{2.0});
}

TEST_CASE("defaults validate for every subcommand") {
  for (const char* s : {"fig12", "fig3", "transition", "verify"}) CHECK_NOTHROW(validate(default_config(s)));
  CHECK_THROWS_AS(default_config("fig4"), ConfigError);
}

TEST_CASE("parses a section and ignores the others") {
  const std::string text =
      "# comment\n"
      "[fig3]\n"
      "r_count = 5\n"
      "\n"
      "[fig12]\n"
      "family = sphere_shell   # trailing comment\n"
      "B0_tau = 0.1, 1 ,10\n"
      "b0_over_B0_min = 0.5\n"
      "b0_over_B0_spacing = linear\n"
      "seed = 99\n";
  const SweepConfig c = parse_config(text, "fig12");
  CHECK(c.family == "sphere_shell");
  CHECK(c.B0_tau == std::vector<double>{0.1, 1.0, 10.0});
  CHECK(c.b0_over_B0.min == 0.5);
  CHECK(c.b0_over_B0.spacing == Spacing::Linear);
  CHECK(c.seed == 99);
  CHECK(parse_config(text, "fig3").r.count == 5);
}

TEST_CASE("errors name the offending line") {
  CHECK(error_of("[fig12]\nfamily = planar_ring\ncolour = red\n", "fig12").find("line 3") != std::string::npos);
  CHECK(error_of("[fig5]\n", "fig12").find("line 1") != std::string::npos);
  CHECK(error_of("[fig12]\nB0_tau = 0.1x\n", "fig12").find("line 2") != std::string::npos);
  CHECK(error_of("[fig12]\nseed = 1\nseed = 2\n", "fig12").find("duplicate") != std::string::npos);
  CHECK(error_of("seed = 1\n", "fig12").find("outside") != std::string::npos);
  CHECK(error_of("[verify]\nfamilies = planar_ring, torus\n", "verify").find("torus") != std::string::npos);
  // keys are scoped to their section
  CHECK(error_of("[fig12]\nr_min = 0\n", "fig12").find("unknown key") != std::string::npos);
  CHECK(error_of("[fig12]\nb0_over_B0_spacing = cubic\n", "fig12").find("line 2") != std::string::npos);
}

TEST_CASE("range validation") {
  CHECK_THROWS_AS(parse_config("[fig12]\nb0_over_B0_min = 0\n", "fig12"), ConfigError);
  CHECK_THROWS_AS(parse_config("[fig12]\nB0_tau = 0\n", "fig12"), ConfigError);
  CHECK_THROWS_AS(parse_config("[fig3]\nr_max = 1.5\n", "fig3"), ConfigError);
  CHECK_THROWS_AS(parse_config("[fig3]\nr_count = 0\n", "fig3"), ConfigError);
  CHECK_THROWS_AS(parse_config("[verify]\nb0_tau = -0.1\n", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config("[verify]\ntrajectories = 0\n", "verify"), ConfigError);
  CHECK_THROWS_AS(parse_config("[transition]\nanisotropy_min = -0.5\n", "transition"), ConfigError);
  CHECK(parse_config("[verify]\ncorrelated_r =\n", "verify").correlated_r.empty());
}

TEST_CASE("load_config prefixes the path") {
  CHECK_THROWS_AS(load_config("/nonexistent/x.conf", "fig12"), ConfigError);
  const std::string path = "test_config_tmp.conf";
  {
    std::ofstream f(path);
    f << "[transition]\nbogus = 1\n";
  }
  try {
    load_config(path, "transition");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(path + ": line 2") == 0);
  }
  std::remove(path.c_str());
}
