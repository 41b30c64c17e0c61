#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>

#include "uclf_adapt/simloop.hpp"
#include "uclf_adapt/trace_io.hpp"

using namespace uclf_adapt;

namespace {

const sim::RunResult& short_run() {
  static const sim::RunResult r = [] {
    auto sc = sim::default_scenario("eq7-split");
    sc.adapt.matched = true;
    sc.integrator.horizon = 1.0;
    return sim::run_scenario(sc);
  }();
  return r;
}

void check_identical(const cli::TraceTable& a, const cli::TraceTable& b) {
  REQUIRE(a.columns == b.columns);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    REQUIRE(a.rows[k].size() == b.rows[k].size());
    for (std::size_t j = 0; j < a.rows[k].size(); ++j) CHECK(a.rows[k][j] == b.rows[k][j]);
  }
}

}  // namespace

TEST_SUITE("trace_io") {

TEST_CASE("columns") {
  const auto cols = cli::trace_columns(short_run().trace, true);
  CHECK(cols.front() == "t");
  CHECK(cols.back() == "phihat2");
  CHECK(std::count(cols.begin(), cols.end(), "gamma4") == 1);
  CHECK(cols.size() == 1 + 3 + 1 + 4 * 5 + 3 + 2);
}

TEST_CASE("csv and json carry the same values") {
  const auto table = cli::tabulate(short_run().trace, true);
  std::stringstream csv, json;
  cli::write_csv(csv, table);
  cli::write_json(json, table);
  const auto from_csv = cli::read_csv(csv);
  const auto from_json = cli::read_json(json);
  check_identical(from_csv, table);
  check_identical(from_json, from_csv);
}

TEST_CASE("stride keeps the final sample") {
  const auto& tr = short_run().trace;
  const auto table = cli::tabulate(tr, false, 300);
  CHECK(table.rows.size() == 5);
  CHECK(table.rows.back().front() == tr.t.back());
  CHECK(table.rows[1].front() == tr.t[300]);
}

TEST_CASE("writing is deterministic") {
  const auto table = cli::tabulate(short_run().trace, true);
  std::stringstream a, b;
  cli::write_csv(a, table);
  cli::write_csv(b, table);
  CHECK(a.str() == b.str());
}

TEST_CASE("doubles survive text") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(mant(rng), ex(rng));
    CHECK(std::strtod(cli::format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("non-finite values become null in json") {
  cli::TraceTable t{{"t", "x1"}, {{0.0, std::numeric_limits<double>::infinity()}}};
  std::stringstream s;
  cli::write_json(s, t);
  CHECK(s.str().find("null") != std::string::npos);
  const auto back = cli::read_json(s);
  CHECK(std::isnan(back.rows[0][1]));
}

TEST_CASE("malformed input is rejected") {
  std::stringstream empty;
  CHECK_THROWS_AS(cli::read_csv(empty), std::runtime_error);
  std::stringstream ragged("t,x1\n0,1\n1\n");
  CHECK_THROWS_AS(cli::read_csv(ragged), std::runtime_error);
  std::stringstream word("t,x1\n0,abc\n");
  CHECK_THROWS_AS(cli::read_csv(word), std::runtime_error);
  std::stringstream wide(R"({"columns":["t"],"rows":[[0,1]]})");
  CHECK_THROWS_AS(cli::read_json(wide), std::runtime_error);
}

TEST_CASE("metrics json") {
  const auto j = cli::metrics_json(short_run().metrics);
  CHECK(j.contains("gain_reduction"));
  CHECK(j["gain_reduction"].size() == 4);
  CHECK(j["converged"].is_boolean());
}

}  // TEST_SUITE
