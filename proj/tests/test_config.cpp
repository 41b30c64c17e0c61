#include <doctest.h>

#include <filesystem>

#include "test_support.hpp"
#include "uclf_adapt/config.hpp"
#include "uclf_adapt/errors.hpp"

using namespace uclf_adapt;
using cli::parse_config;

TEST_SUITE("config") {

TEST_CASE("missing keys fall back to the model preset") {
  const auto cfg = parse_config("[model]\nid = \"min2\"\n");
  const auto& sc = cfg.scenario;
  CHECK(sc.model->id() == "min2");
  CHECK(sc.family->id() == "min2-backstep");
  CHECK(sc.adapt.variant == adapt::LawVariant::kCorollary1);
  CHECK(sc.integrator.horizon == 50.0);
  CHECK(sc.x0 == plant::make_preset("min2").x0);
  CHECK(cfg.output.format == "csv");
}

TEST_CASE("per-parameter scalars are broadcast") {
  const auto cfg = parse_config(
      "[model]\nid = \"eq7\"\n[adapt]\ngamma_bar = 0.5\nlambda = [1, 2, 3, 4]\n");
  CHECK(cfg.scenario.adapt.nominal == Eigen::VectorXd::Constant(4, 0.5));
  CHECK(cfg.scenario.adapt.leak_rate[3] == 4.0);
}

TEST_CASE("unknown keys and tables are rejected with their line") {
  CHECK_THROWS_WITH_AS(parse_config("[model]\nid = \"eq7\"\n\n[adapt]\ngama_bar = 1\n"),
                       doctest::Contains("<string>:5:"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[plot]\ncolor = \"red\"\n"),
                       doctest::Contains("plot"), ConfigError);
}

TEST_CASE("invalid values name the invariant and the line") {
  CHECK_THROWS_WITH_AS(cli::load_config(test_support::config_path("eq7_bad_eta")),
                       doctest::Contains("eq7_bad_eta.toml:6: adapt.eta[1]"),
                       ConfigError);
  CHECK_THROWS_AS(parse_config("[uclf]\nk1 = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nid = \"eq9\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[output]\nformat = \"xml\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[integrator]\nmethod = \"rk45\"\nstep = 1e-3\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[scenario]\nx0 = [1, 2]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scenario]\nhorizon = \"long\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model\n"), ConfigError);
  CHECK_THROWS_AS(cli::load_config("/nonexistent/cfg.toml"), ConfigError);
}

TEST_CASE("adaptive integrator settings") {
  const auto cfg = parse_config(
      "[integrator]\nmethod = \"rk45\"\nrel_tol = 1e-9\nsample_interval = 0.05\n");
  const auto& in = cfg.scenario.integrator;
  REQUIRE_FALSE(in.is_fixed());
  CHECK(std::get<numkit::AdaptiveStep>(in.method).rel_tol == 1e-9);
  CHECK(cfg.scenario.sample_interval == 0.05);
}

TEST_CASE("boxes and matrices") {
  const auto cfg = parse_config(
      "[model]\nid = \"eq7-split\"\n[adapt]\nmatched = true\n"
      "matched_gain = [2.0, 3.0]\n[scenario]\nphi_box = [[-2, 2], [-6, 2]]\n");
  const auto& sc = cfg.scenario;
  CHECK(sc.adapt.matched);
  CHECK(sc.adapt.matched_gain(0, 0) == 2.0);
  CHECK(sc.adapt.matched_gain(1, 1) == 3.0);
  CHECK(sc.adapt.matched_gain(0, 1) == 0.0);
  CHECK(sc.phi_box.lo()[1] == -6.0);
}

TEST_CASE("every bundled config except the invalid one loads") {
  int loaded = 0;
  for (const auto& entry : std::filesystem::directory_iterator(UCLF_ADAPT_CONFIG_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    if (entry.path().stem() == "eq7_bad_eta") continue;
    INFO(entry.path().string());
    CHECK_NOTHROW(cli::load_config(entry.path().string()));
    ++loaded;
  }
  CHECK(loaded >= 10);
}

TEST_CASE("the default output stride matches the sample interval") {
  const auto cfg = parse_config("[integrator]\nstep = 1e-3\nsample_interval = 1e-2\n");
  CHECK(cfg.output_stride() == 10);
}

}  // TEST_SUITE
