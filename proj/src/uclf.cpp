#include "uclf_adapt/uclf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "uclf_adapt/errors.hpp"

namespace uclf_adapt::uclf {
namespace {

void check_dims(const UclfFamily& family, const Vector& x,
                const Vector& theta_hat, const char* where) {
  if (x.size() != family.state_dim())
    throw ContractViolation(std::string(where) + ": state dimension mismatch");
  if (theta_hat.size() != family.param_dim())
    throw ContractViolation(std::string(where) + ": theta dimension mismatch");
}

void check_gains(const BacksteppingGains& g, bool needs_k3) {
  if (!(g.k1 > 0) || !(g.k2 > 0) || (needs_k3 && !(g.k3 > 0)))
    throw ContractViolation("backstepping gains must be positive");
  if (!(g.x2_weight > 0))
    throw ContractViolation("x2 weight must be positive");
}

}  // namespace

double eval_V(const UclfFamily& family, const Vector& x,
              const Vector& theta_hat, double t) {
  check_dims(family, x, theta_hat, "eval_V");
  return family.value(x, theta_hat, t);
}

Vector grad_x_V(const UclfFamily& family, const Vector& x,
                const Vector& theta_hat, double t) {
  check_dims(family, x, theta_hat, "grad_x_V");
  return family.grad_x(x, theta_hat, t);
}

Vector grad_theta_V(const UclfFamily& family, const Vector& x,
                    const Vector& theta_hat, double t) {
  check_dims(family, x, theta_hat, "grad_theta_V");
  return family.grad_theta(x, theta_hat, t);
}

double eval_Q(const UclfFamily& family, const Vector& x,
              const Vector& theta_hat) {
  check_dims(family, x, theta_hat, "eval_Q");
  return family.dissipation(x, theta_hat);
}

Vector ce_control(const UclfFamily& family, const Vector& x,
                  const Vector& theta_hat, double t) {
  check_dims(family, x, theta_hat, "ce_control");
  return family.control(x, theta_hat, t);
}

// --- eq7 -----------------------------------------------------------------

Eq7Backstepping::Eq7Backstepping(BacksteppingGains gains, double theta2_bound)
    : gains_(gains), theta2_bound_(std::abs(theta2_bound)) {
  check_gains(gains_, true);
}

double Eq7Backstepping::alpha(double x1, const Vector& th) const {
  return th[0] * x1 - gains_.k1 * x1 - gains_.k3 * x1 * x1 * x1;
}

double Eq7Backstepping::alpha_slope(double x1, const Vector& th) const {
  return th[0] - gains_.k1 - 3 * gains_.k3 * x1 * x1;
}

double Eq7Backstepping::value(const Vector& x, const Vector& th,
                              double) const {
  const double z = x[2] - alpha(x[0], th);
  return 0.5 * x[0] * x[0] + 0.5 * gains_.x2_weight * x[1] * x[1] +
         0.5 * z * z;
}

Vector Eq7Backstepping::grad_x(const Vector& x, const Vector& th,
                               double) const {
  const double z = x[2] - alpha(x[0], th);
  return Vector{{x[0] - z * alpha_slope(x[0], th), gains_.x2_weight * x[1], z}};
}

Vector Eq7Backstepping::grad_theta(const Vector& x, const Vector& th,
                                   double) const {
  const double z = x[2] - alpha(x[0], th);
  return Vector{{-x[0] * z, 0.0, 0.0, 0.0}};
}

double Eq7Backstepping::dissipation(const Vector& x, const Vector& th) const {
  const double x1sq = x[0] * x[0];
  const double z = x[2] - alpha(x[0], th);
  const double half_beta = 0.5 * gains_.x2_weight;
  return gains_.k1 * x1sq +
         (gains_.k3 - half_beta * theta2_bound_ * theta2_bound_) * x1sq * x1sq +
         half_beta * x[1] * x[1] + gains_.k2 * z * z;
}

Vector Eq7Backstepping::control(const Vector& x, const Vector& th,
                                double) const {
  const double z = x[2] - alpha(x[0], th);
  const double x1dot_hat = x[2] - th[0] * x[0];
  const double u = -std::tanh(x[1]) + th[2] * x[2] + th[3] * x[0] * x[0] +
                   alpha_slope(x[0], th) * x1dot_hat - x[0] - gains_.k2 * z;
  return Vector{{u}};
}

// --- chain3 --------------------------------------------------------------

namespace {

struct ChainTerms {
  double a;   // th1 - k1
  double c1;  // a2 = c1 x1 + c2 x2
  double c2;
  double z1, z2, z3;
};

ChainTerms chain_terms(const BacksteppingGains& g, const Vector& x,
                       const Vector& th) {
  ChainTerms c{};
  c.a = th[0] - g.k1;
  c.c1 = -1.0 + c.a * (g.k2 - th[0]);
  c.c2 = c.a + th[1] - g.k2;
  c.z1 = x[0];
  c.z2 = x[1] - c.a * x[0];
  c.z3 = x[2] - c.c1 * x[0] - c.c2 * x[1];
  return c;
}

}  // namespace

ChainBackstepping::ChainBackstepping(BacksteppingGains gains) : gains_(gains) {
  check_gains(gains_, true);
}

Vector ChainBackstepping::errors(const Vector& x, const Vector& th) const {
  const auto c = chain_terms(gains_, x, th);
  return Vector{{c.z1, c.z2, c.z3}};
}

double ChainBackstepping::value(const Vector& x, const Vector& th,
                                double) const {
  const auto c = chain_terms(gains_, x, th);
  return 0.5 * (c.z1 * c.z1 + c.z2 * c.z2 + c.z3 * c.z3);
}

Vector ChainBackstepping::grad_x(const Vector& x, const Vector& th,
                                 double) const {
  const auto c = chain_terms(gains_, x, th);
  return Vector{{c.z1 - c.a * c.z2 - c.c1 * c.z3, c.z2 - c.c2 * c.z3, c.z3}};
}

Vector ChainBackstepping::grad_theta(const Vector& x, const Vector& th,
                                     double) const {
  const auto c = chain_terms(gains_, x, th);
  const double dc1 = gains_.k2 - 2 * th[0] + gains_.k1;
  return Vector{{-x[0] * c.z2 - c.z3 * (dc1 * x[0] + x[1]), -c.z3 * x[1]}};
}

double ChainBackstepping::dissipation(const Vector& x,
                                      const Vector& th) const {
  const auto c = chain_terms(gains_, x, th);
  return gains_.k1 * c.z1 * c.z1 + gains_.k2 * c.z2 * c.z2 +
         gains_.k3 * c.z3 * c.z3;
}

Vector ChainBackstepping::control(const Vector& x, const Vector& th,
                                  double) const {
  const auto c = chain_terms(gains_, x, th);
  const double u = -c.z2 - gains_.k3 * c.z3 + c.c1 * (x[1] - th[0] * x[0]) +
                   c.c2 * (x[2] - th[1] * x[1]);
  return Vector{{u}};
}

// --- min2 ----------------------------------------------------------------

MinimalBackstepping::MinimalBackstepping(BacksteppingGains gains)
    : gains_(gains) {
  check_gains(gains_, false);
}

double MinimalBackstepping::value(const Vector& x, const Vector& th,
                                  double) const {
  const double z2 = x[1] - (th[0] - gains_.k1) * x[0];
  return 0.5 * (x[0] * x[0] + z2 * z2);
}

Vector MinimalBackstepping::grad_x(const Vector& x, const Vector& th,
                                   double) const {
  const double a = th[0] - gains_.k1;
  const double z2 = x[1] - a * x[0];
  return Vector{{x[0] - a * z2, z2}};
}

Vector MinimalBackstepping::grad_theta(const Vector& x, const Vector& th,
                                       double) const {
  const double z2 = x[1] - (th[0] - gains_.k1) * x[0];
  return Vector{{-x[0] * z2}};
}

double MinimalBackstepping::dissipation(const Vector& x,
                                        const Vector& th) const {
  const double z2 = x[1] - (th[0] - gains_.k1) * x[0];
  return gains_.k1 * x[0] * x[0] + gains_.k2 * z2 * z2;
}

Vector MinimalBackstepping::control(const Vector& x, const Vector& th,
                                    double) const {
  const double a = th[0] - gains_.k1;
  const double z2 = x[1] - a * x[0];
  return Vector{{-x[0] - gains_.k2 * z2 + a * (x[1] - th[0] * x[0])}};
}

// --- registry ------------------------------------------------------------

const std::vector<std::string>& family_ids() {
  static const std::vector<std::string> ids{"eq7-backstep", "chain3-backstep",
                                            "min2-backstep"};
  return ids;
}

BacksteppingGains default_gains(std::string_view id) {
  BacksteppingGains g;
  if (id == "eq7-backstep") g.k3 = 5.0;
  return g;
}

FamilyPtr make_family(std::string_view id, const BacksteppingGains& gains,
                      const plant::ParamBox& theta_box) {
  if (id == "eq7-backstep") {
    if (theta_box.dim() != 4)
      throw ConfigError("eq7-backstep needs a 4-dimensional theta box");
    const double bound = std::max(std::abs(theta_box.lo()[1]),
                                  std::abs(theta_box.hi()[1]));
    return std::make_shared<Eq7Backstepping>(gains, bound);
  }
  if (id == "chain3-backstep") return std::make_shared<ChainBackstepping>(gains);
  if (id == "min2-backstep") return std::make_shared<MinimalBackstepping>(gains);
  throw ConfigError("unknown uclf id '" + std::string(id) + "'");
}

bool family_matches_model(std::string_view family_id,
                          std::string_view model_id) {
  if (family_id == "eq7-backstep")
    return model_id == "eq7" || model_id == "eq7-split";
  if (family_id == "chain3-backstep") return model_id == "chain3";
  if (family_id == "min2-backstep") return model_id == "min2";
  return false;
}

// --- certifier -----------------------------------------------------------

double certificate_margin(const UclfFamily& family,
                          const plant::SystemModel& model, const Vector& x,
                          const Vector& theta_hat, double t) {
  const Vector u = family.control(x, theta_hat, t);
  const Vector phi = Vector::Zero(model.matched_dim());
  const Vector xdot = plant::eval_dynamics(model, x, u, theta_hat, phi, t);
  const double vdot = family.time_derivative(x, theta_hat, t) +
                      family.grad_x(x, theta_hat, t).dot(xdot);
  return -vdot - family.dissipation(x, theta_hat);
}

namespace {

std::vector<double> axis(double lo, double hi, int points) {
  if (points <= 1 || lo == hi) return {0.5 * (lo + hi)};
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    v[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return v;
}

// Odometer over a tensor grid.
class GridWalker {
 public:
  explicit GridWalker(std::vector<std::vector<double>> axes)
      : axes_(std::move(axes)), index_(axes_.size(), 0) {}

  Vector point() const {
    Vector p(static_cast<Eigen::Index>(axes_.size()));
    for (std::size_t i = 0; i < axes_.size(); ++i)
      p[static_cast<Eigen::Index>(i)] = axes_[i][index_[i]];
    return p;
  }

  bool next() {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (++index_[i] < axes_[i].size()) return true;
      index_[i] = 0;
    }
    return false;
  }

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> index_;
};

}  // namespace

CertificateReport verify_uclf(const UclfFamily& family,
                              const plant::SystemModel& model,
                              const plant::ParamBox& box,
                              const CertifySpec& spec) {
  if (family.state_dim() != model.state_dim() ||
      family.param_dim() != model.unmatched_dim() ||
      box.dim() != model.unmatched_dim())
    throw ContractViolation("verify_uclf: family/model/box dimension mismatch");
  if (!(spec.half_width > 0) || spec.state_points < 1 || spec.param_points < 1)
    throw ContractViolation("verify_uclf: invalid sampler spec");

  std::vector<std::vector<double>> x_axes(
      static_cast<std::size_t>(model.state_dim()),
      axis(-spec.half_width, spec.half_width, spec.state_points));
  std::vector<std::vector<double>> th_axes;
  for (int i = 0; i < box.dim(); ++i)
    th_axes.push_back(axis(box.lo()[i], box.hi()[i], spec.param_points));

  const Vector xd = family.equilibrium();
  constexpr double inf = std::numeric_limits<double>::infinity();
  CertificateReport report;
  report.min_margin = inf;
  report.min_dissipation = inf;
  report.min_energy = inf;

  // Keep the lowest-scoring samples; score = min(margin, Q away from x_d).
  std::vector<std::pair<double, CertSample>> worst;
  auto offer = [&](double score, CertSample s) {
    if (worst.size() < spec.witnesses || score < worst.back().first) {
      worst.emplace_back(score, std::move(s));
      std::sort(worst.begin(), worst.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (worst.size() > spec.witnesses) worst.pop_back();
    }
  };

  GridWalker th_walk(th_axes);
  do {
    const Vector th = th_walk.point();
    GridWalker x_walk(x_axes);
    do {
      const Vector x = x_walk.point();
      CertSample s;
      s.margin = certificate_margin(family, model, x, th);
      s.dissipation = family.dissipation(x, th);
      s.energy = family.value(x, th, 0.0);
      ++report.samples;
      report.min_margin = std::min(report.min_margin, s.margin);
      double score = s.margin;
      if ((x - xd).norm() > 0) {
        report.min_dissipation = std::min(report.min_dissipation, s.dissipation);
        report.min_energy = std::min(report.min_energy, s.energy);
        score = std::min(score, s.dissipation);
      }
      if (worst.size() < spec.witnesses || score < worst.back().first) {
        s.x = x;
        s.theta_hat = th;
        offer(score, std::move(s));
      }
    } while (x_walk.next());
  } while (th_walk.next());

  for (auto& w : worst) report.worst.push_back(std::move(w.second));

  std::ostringstream why;
  if (report.min_margin < -spec.tolerance)
    why << "dissipation inequality violated (min margin " << report.min_margin
        << ")";
  else if (!(report.min_dissipation > 0))
    why << "Q not positive definite (min Q " << report.min_dissipation << ")";
  else if (!(report.min_energy > 0))
    why << "V not positive definite (min V " << report.min_energy << ")";
  report.failure = why.str();
  report.passed = report.failure.empty();
  return report;
}

}  // namespace uclf_adapt::uclf
