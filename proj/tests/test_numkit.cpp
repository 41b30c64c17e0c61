#include <doctest.h>

#include <cmath>

#include "uclf_adapt/errors.hpp"
#include "uclf_adapt/numkit.hpp"

using namespace uclf_adapt;
using numkit::Vector;

namespace {

numkit::IntegratorSpec fixed(double step, double horizon) {
  numkit::IntegratorSpec s;
  s.method = numkit::FixedStep{step};
  s.horizon = horizon;
  return s;
}

numkit::IntegratorSpec adaptive(double rel_tol, double horizon) {
  numkit::IntegratorSpec s;
  numkit::AdaptiveStep a;
  a.rel_tol = rel_tol;
  a.abs_tol = rel_tol * 1e-2;
  s.method = a;
  s.horizon = horizon;
  return s;
}

Vector decay(double, const Vector& x) { return -x; }

Vector scalar(double v) { return Vector::Constant(1, v); }

double rk4_decay_error(double step) {
  const auto tr = numkit::integrate_fixed(decay, 0.0, scalar(1.0), fixed(step, 1.0));
  return std::abs(tr.x.back()[0] - std::exp(-1.0));
}

}  // namespace

TEST_SUITE("numkit") {

TEST_CASE("rk4 keeps a constant solution") {
  auto zero = [](double, const Vector& x) { return Vector::Zero(x.size()); };
  const auto tr = numkit::integrate_fixed(zero, 0.0, scalar(2.0), fixed(0.1, 1.0));
  CHECK(tr.size() == 11);
  CHECK(tr.t.back() == doctest::Approx(1.0));
  CHECK(tr.x.back()[0] == 2.0);
}

TEST_CASE("rk4 matches exponential decay") {
  CHECK(rk4_decay_error(1e-3) <= 1e-9);
}

TEST_CASE("rk4 conserves oscillator energy") {
  auto osc = [](double, const Vector& x) {
    Vector d(2);
    d << x[1], -x[0];
    return d;
  };
  Vector x0(2);
  x0 << 1.0, 0.0;
  const auto tr = numkit::integrate_fixed(osc, 0.0, x0, fixed(1e-3, 10.0));
  double drift = 0;
  for (const auto& x : tr.x) drift = std::max(drift, std::abs(x.squaredNorm() - 1.0));
  CHECK(drift <= 1e-6);
  CHECK(tr.x.back()[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-9));
}

TEST_CASE("rk4 error is fourth order") {
  const double e1 = rk4_decay_error(1e-2);
  const double e2 = rk4_decay_error(5e-3);
  const double e3 = rk4_decay_error(2.5e-3);
  CHECK(e1 / e2 >= 8.0);
  CHECK(e2 / e3 >= 8.0);
}

TEST_CASE("rk4 reports divergence with the last valid time") {
  auto escape = [](double, const Vector& x) { return Vector(x.array().square()); };
  try {
    numkit::integrate_fixed(escape, 0.0, scalar(1.0), fixed(1e-3, 2.0));
    FAIL("expected divergence");
  } catch (const numkit::IntegrationDiverged& e) {
    CHECK(e.last_valid_time() > 0.9);
    CHECK(e.last_valid_time() < 1.1);
    CHECK_FALSE(e.partial().empty());
    CHECK(e.partial().t.back() == doctest::Approx(e.last_valid_time()));
  }
}

TEST_CASE("post-step hook can rewrite the state") {
  auto grow = [](double, const Vector& x) { return Vector::Ones(x.size()); };
  const auto tr = numkit::integrate_fixed(
      grow, 0.0, scalar(0.0), fixed(0.01, 1.0),
      [](double, Vector& x) { x[0] = std::min(x[0], 0.5); });
  CHECK(tr.x.back()[0] == 0.5);
}

TEST_CASE("adaptive integrator matches exponential decay") {
  const auto r = numkit::integrate_adaptive(decay, 0.0, scalar(1.0), adaptive(1e-8, 1.0));
  CHECK(r.samples.t.back() == doctest::Approx(1.0));
  CHECK(std::abs(r.samples.x.back()[0] - std::exp(-1.0)) <= 1e-7);
  CHECK(r.stats.accepted > 0);
}

TEST_CASE("adaptive integrator never rejects on a zero field") {
  auto zero = [](double, const Vector& x) { return Vector::Zero(x.size()); };
  Vector x0(3);
  x0 << 1.0, -2.0, 3.0;
  const auto grid = numkit::uniform_grid(0.0, 5.0, 0.5);
  const auto r = numkit::integrate_adaptive(zero, 0.0, x0, adaptive(1e-8, 5.0), grid);
  CHECK(r.stats.rejected == 0);
  REQUIRE(r.samples.size() == grid.size());
  for (const auto& x : r.samples.x) CHECK(x == x0);
}

TEST_CASE("adaptive integrator stops before a finite escape") {
  auto escape = [](double, const Vector& x) { return Vector(x.array().square()); };
  try {
    numkit::integrate_adaptive(escape, 0.0, scalar(1.0), adaptive(1e-8, 2.0));
    FAIL("expected divergence");
  } catch (const numkit::IntegrationDiverged& e) {
    CHECK(e.last_valid_time() < 1.0);
    CHECK(e.last_valid_time() > 0.9);
  }
}

TEST_CASE("adaptive output does not depend on grid density") {
  auto osc = [](double, const Vector& x) {
    Vector d(2);
    d << x[1], -x[0] - 0.1 * x[1];
    return d;
  };
  Vector x0(2);
  x0 << 1.0, 0.5;
  const double tol = 1e-8;
  const auto coarse_grid = numkit::uniform_grid(0.0, 10.0, 1.0);
  const auto fine_grid = numkit::uniform_grid(0.0, 10.0, 0.01);
  const auto coarse =
      numkit::integrate_adaptive(osc, 0.0, x0, adaptive(tol, 10.0), coarse_grid);
  const auto fine =
      numkit::integrate_adaptive(osc, 0.0, x0, adaptive(tol, 10.0), fine_grid);
  REQUIRE(coarse.samples.size() == 11);
  REQUIRE(fine.samples.size() == 1001);
  for (std::size_t k = 0; k < coarse.samples.size(); ++k) {
    const Vector& a = coarse.samples.x[k];
    const Vector& b = fine.samples.x[100 * k];
    CHECK((a - b).cwiseAbs().maxCoeff() <= 10 * tol);
  }
}

TEST_CASE("adaptive integrator rejects a grid outside the span") {
  const std::vector<double> grid{0.0, 2.0};
  CHECK_THROWS_AS(numkit::integrate_adaptive(decay, 0.0, scalar(1.0),
                                             adaptive(1e-6, 1.0), grid),
                  ContractViolation);
}

TEST_CASE("integrator specs are validated") {
  CHECK_THROWS_AS(fixed(0.0, 1.0).validate(), ContractViolation);
  CHECK_THROWS_AS(fixed(1e-3, -1.0).validate(), ContractViolation);
  auto bad = adaptive(1e-6, 1.0);
  std::get<numkit::AdaptiveStep>(bad.method).min_step = 1.0;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  CHECK_THROWS_AS(numkit::integrate_fixed(decay, 0.0, scalar(1.0), adaptive(1e-6, 1.0)),
                  ContractViolation);
}

TEST_CASE("uniform grid includes both ends") {
  const auto g = numkit::uniform_grid(0.0, 1.0, 0.25);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
}

TEST_CASE("finite differences") {
  SUBCASE("square") {
    const auto g = numkit::finite_diff_gradient(
        [](const Vector& x) { return x[0] * x[0]; }, scalar(3.0), 1e-5);
    CHECK(std::abs(g[0] - 6.0) <= 1e-8);
  }
  SUBCASE("constant field") {
    const auto g = numkit::finite_diff_gradient([](const Vector&) { return 4.0; },
                                                Vector::Ones(3), 1e-5);
    CHECK(g == Vector::Zero(3));
  }
  SUBCASE("non-finite values propagate as errors") {
    CHECK_THROWS_AS(numkit::finite_diff_gradient(
                        [](const Vector& x) { return std::log(x[0]); },
                        scalar(0.0), 1e-5),
                    DomainError);
  }
}

}  // TEST_SUITE
