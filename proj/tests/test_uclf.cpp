#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "uclf_adapt/errors.hpp"
#include "uclf_adapt/numkit.hpp"
#include "uclf_adapt/plant.hpp"
#include "uclf_adapt/uclf.hpp"

using namespace uclf_adapt;
using uclf::Vector;

namespace {

struct Setup {
  plant::ModelPreset preset;
  uclf::FamilyPtr family;
};

Setup setup(const std::string& model_id, const std::string& family_id) {
  Setup s{plant::make_preset(model_id), nullptr};
  s.family = uclf::make_family(family_id, uclf::default_gains(family_id),
                               s.preset.theta_box);
  return s;
}

std::vector<Setup> shipped() {
  return {setup("eq7", "eq7-backstep"), setup("chain3", "chain3-backstep"),
          setup("min2", "min2-backstep")};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Hand-written eq7 family for comparison.
struct Eq7Oracle {
  double k1, k2, k3, beta;
  double alpha(const Vector& x, const Vector& th) const {
    return th[0] * x[0] - k1 * x[0] - k3 * x[0] * x[0] * x[0];
  }
  double V(const Vector& x, const Vector& th) const {
    const double z = x[2] - alpha(x, th);
    return 0.5 * x[0] * x[0] + 0.5 * beta * x[1] * x[1] + 0.5 * z * z;
  }
  double u(const Vector& x, const Vector& th) const {
    const double z = x[2] - alpha(x, th);
    const double slope = th[0] - k1 - 3 * k3 * x[0] * x[0];
    return -std::tanh(x[1]) + th[2] * x[2] + th[3] * x[0] * x[0] +
           slope * (x[2] - th[0] * x[0]) - x[0] - k2 * z;
  }
};

// dV/dt along the certainty-equivalence closed loop, by differencing V in
// time along the vector field.
double vdot_along_flow(const uclf::UclfFamily& fam, const plant::SystemModel& m,
                       const Vector& x, const Vector& th) {
  const Vector u = fam.control(x, th, 0.0);
  const Vector f = plant::eval_dynamics(m, x, u, th, Vector(), 0.0);
  auto along = [&](const Vector& s) { return fam.value(x + s[0] * f, th, 0.0); };
  return test_support::stencil_gradient(along, Vector::Zero(1), 1e-4)[0];
}

}  // namespace

TEST_SUITE("uclf") {

TEST_CASE("energy, gradient and dissipation vanish at the equilibrium") {
  std::mt19937_64 rng(1);
  for (const auto& s : shipped()) {
    const auto& box = s.preset.theta_box;
    const Vector th = test_support::uniform_in(rng, box.lo(), box.hi());
    const Vector xd = s.family->equilibrium();
    CHECK(uclf::eval_V(*s.family, xd, th, 0.0) == 0.0);
    CHECK(uclf::grad_x_V(*s.family, xd, th, 0.0) == Vector::Zero(xd.size()));
    CHECK(uclf::eval_Q(*s.family, xd, th) == 0.0);
  }
}

TEST_CASE("eq7 energy on the virtual-control manifold") {
  for (double beta : {1.0, 2.5}) {
    uclf::BacksteppingGains g{1.0, 1.0, 5.0, beta};
    uclf::Eq7Backstepping fam(g, 3.0);
    const Vector th = vec({0.3, -1.0, 0.5, 2.0});
    const Vector x = vec({1.0, 1.0, fam.alpha(1.0, th)});
    CHECK(fam.value(x, th, 0.0) == doctest::Approx(0.5 + beta / 2).epsilon(1e-14));
    CHECK(fam.alpha(1.0, th) == doctest::Approx(0.3 - 1.0 - 5.0));
  }
}

TEST_CASE("eq7 family agrees with a hand-written copy") {
  const auto s = setup("eq7", "eq7-backstep");
  const Eq7Oracle o{1.0, 1.0, 5.0, 1.0};
  std::mt19937_64 rng(2);
  const auto& box = s.preset.theta_box;
  for (int k = 0; k < 100; ++k) {
    const Vector x = test_support::uniform_cube(rng, 3, 3.0);
    const Vector th = test_support::uniform_in(rng, box.lo(), box.hi());
    CHECK(s.family->value(x, th, 0) == doctest::Approx(o.V(x, th)).epsilon(1e-13));
    CHECK(s.family->control(x, th, 0)[0] ==
          doctest::Approx(o.u(x, th)).epsilon(1e-12));
    const double z = x[2] - o.alpha(x, th);
    const Vector gth = s.family->grad_theta(x, th, 0);
    CHECK(gth[0] == doctest::Approx(-x[0] * z).epsilon(1e-13));
    // Only th1 enters the eq7 family.
    CHECK(gth.tail(3) == Vector::Zero(3));
  }
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(3);
  for (const auto& s : shipped()) {
    const auto& fam = *s.family;
    const auto& box = s.preset.theta_box;
    double worst_x = 0, worst_th = 0;
    for (int k = 0; k < 100; ++k) {
      const Vector x = test_support::uniform_cube(rng, fam.state_dim(), 3.0);
      const Vector th = test_support::uniform_in(rng, box.lo(), box.hi());
      const Vector gx = test_support::stencil_gradient(
          [&](const Vector& y) { return fam.value(y, th, 0); }, x);
      const Vector gth = test_support::stencil_gradient(
          [&](const Vector& p) { return fam.value(x, p, 0); }, th);
      worst_x = std::max(worst_x, test_support::rel_error(fam.grad_x(x, th, 0), gx));
      worst_th =
          std::max(worst_th, test_support::rel_error(fam.grad_theta(x, th, 0), gth));
    }
    INFO(fam.id());
    CHECK(worst_x <= 1e-5);
    CHECK(worst_th <= 1e-5);
  }
}

TEST_CASE("numkit differences agree with the analytic eq7 gradient") {
  const auto s = setup("eq7", "eq7-backstep");
  const Vector x = vec({0.7, -0.4, 1.3});
  const Vector th = vec({-1.0, 0.5, 0.2, -3.0});
  const Vector fd = numkit::finite_diff_gradient(
      [&](const Vector& y) { return s.family->value(y, th, 0); }, x, 1e-5);
  CHECK(test_support::rel_error(s.family->grad_x(x, th, 0), fd) <= 1e-6);
}

TEST_CASE("chain family depends on both estimates") {
  const auto s = setup("chain3", "chain3-backstep");
  const Vector g = s.family->grad_theta(vec({1.0, 0.5, -0.2}), vec({0.3, -0.4}), 0);
  CHECK(g[0] != 0.0);
  CHECK(g[1] != 0.0);
}

TEST_CASE("energy grows without bound along rays") {
  std::mt19937_64 rng(4);
  for (const auto& s : shipped()) {
    const auto& fam = *s.family;
    const Vector th = s.preset.theta_box.center();
    for (int k = 0; k < 20; ++k) {
      Vector d = test_support::uniform_cube(rng, fam.state_dim(), 1.0);
      d.normalize();
      const double v1 = fam.value(d, th, 0);
      const double v10 = fam.value(10 * d, th, 0);
      const double v100 = fam.value(100 * d, th, 0);
      CHECK(v1 < v10);
      CHECK(v10 < v100);
      CHECK(v100 > 1e3);
    }
  }
}

TEST_CASE("closed loop with exact estimates holds the equilibrium") {
  for (const auto& s : shipped()) {
    const auto& fam = *s.family;
    const Vector th = s.preset.truth.theta;
    const Vector xd = fam.equilibrium();
    const Vector f = plant::eval_dynamics(*s.preset.model, xd, fam.control(xd, th, 0),
                                          th, Vector(), 0.0);
    CHECK(f.norm() == 0.0);
  }
}

TEST_CASE("certainty-equivalence decrease") {
  std::mt19937_64 rng(5);
  for (const auto& s : shipped()) {
    const auto& fam = *s.family;
    const auto& box = s.preset.theta_box;
    for (int k = 0; k < 200; ++k) {
      const Vector x = test_support::uniform_cube(rng, fam.state_dim(), 3.0);
      const Vector th = test_support::uniform_in(rng, box.lo(), box.hi());
      const double vdot = vdot_along_flow(fam, *s.preset.model, x, th);
      const double q = fam.dissipation(x, th);
      // Looser than the certifier tolerance: the time stencil carries
      // truncation and rounding error of its own.
      CHECK(vdot <= -q + 1e-6 * (1 + std::abs(q)));
    }
  }
}

TEST_CASE("certificate margin closed forms") {
  // eq7: margin = (b/2)(x2 + th2 x1^2)^2 + (b/2)(th2max^2 - th2^2) x1^4;
  // the chain and minimal families dissipate exactly Q.
  std::mt19937_64 rng(6);
  for (const auto& s : shipped()) {
    const auto& fam = *s.family;
    const auto& box = s.preset.theta_box;
    for (int k = 0; k < 100; ++k) {
      const Vector x = test_support::uniform_cube(rng, fam.state_dim(), 3.0);
      const Vector th = test_support::uniform_in(rng, box.lo(), box.hi());
      const double got = uclf::certificate_margin(fam, *s.preset.model, x, th);
      double want = 0.0;
      if (fam.id() == "eq7-backstep") {
        const double a = x[1] + th[1] * x[0] * x[0];
        const double x4 = std::pow(x[0], 4);
        want = 0.5 * a * a + 0.5 * (9.0 - th[1] * th[1]) * x4;
      }
      CHECK(got == doctest::Approx(want).epsilon(1e-9).scale(1.0));
    }
    CHECK(uclf::certificate_margin(fam, *s.preset.model, fam.equilibrium(),
                                   box.center()) == 0.0);
  }
}

TEST_CASE("certifier passes the shipped families") {
  for (const auto& s : shipped()) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = uclf::verify_uclf(*s.family, *s.preset.model, s.preset.theta_box);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    INFO(s.family->id() << ": " << rep.failure);
    CHECK(rep.passed);
    CHECK(rep.min_margin >= -1e-9);
    CHECK(rep.min_dissipation > 0);
    CHECK(rep.min_energy > 0);
    CHECK(rep.samples > 0);
    CHECK(secs < 30.0);
  }
}

TEST_CASE("certifier rejects an undersized quartic gain") {
  const auto preset = plant::make_preset("eq7");
  auto gains = uclf::default_gains("eq7-backstep");
  gains.k3 = 1.0;
  const auto fam = uclf::make_family("eq7-backstep", gains, preset.theta_box);
  const auto rep = uclf::verify_uclf(*fam, *preset.model, preset.theta_box);
  CHECK_FALSE(rep.passed);
  CHECK_FALSE(rep.failure.empty());
  REQUIRE_FALSE(rep.worst.empty());
  CHECK(std::abs(rep.worst.front().x[0]) >= 2.0);
}

TEST_CASE("registry") {
  const auto box = plant::make_preset("eq7").theta_box;
  CHECK_THROWS_AS(uclf::make_family("nope", {}, box), ConfigError);
  CHECK(uclf::family_matches_model("eq7-backstep", "eq7"));
  CHECK(uclf::family_matches_model("eq7-backstep", "eq7-split"));
  CHECK_FALSE(uclf::family_matches_model("min2-backstep", "eq7"));
  CHECK(uclf::default_gains("eq7-backstep").k3 == 5.0);
  CHECK_THROWS_AS(uclf::eval_V(*uclf::make_family("min2-backstep", {}, box),
                               Vector::Zero(3), Vector::Zero(1), 0.0),
                  ContractViolation);
}

}  // TEST_SUITE
