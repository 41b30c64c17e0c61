#pragma once

// Adaptation machinery: dynamic gain functions, parameter update laws, the
// gain-rate bound and the laws that realize it, projection, the composite
// prediction-error filter and the single-gain baseline.
//
// Notation used throughout: gamma_i = g_i(rho_i) is the adaptation gain of
// unmatched parameter i, s_i = dV/dth_i * thdot_i is its adaptation transient
// (destabilizing when positive), and w_i = dV/dth_i * [Delta dV/dx]_i, so that
// s_i = -gamma_i w_i for the plain gradient law.

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "uclf_adapt/plant.hpp"

namespace uclf_adapt::adapt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class GainFamily { kExponential, kRational };

std::string_view to_string(GainFamily family);
GainFamily parse_gain_family(std::string_view name);

struct GainValue {
  double gamma = 0;
  double slope = 0;  // d gamma / d rho
};

// exponential: nominal * (0.9 exp(rho / tau) + 0.1)
// rational:    nominal * (0.9 / (rho^2 + 1) + 0.1), restricted to rho <= 0
class GainFunction {
 public:
  GainFunction() = default;
  GainFunction(GainFamily family, double nominal, double tau = 1.0);

  GainFamily family() const { return family_; }
  double nominal() const { return nominal_; }
  double tau() const { return tau_; }
  // Limit of gamma as rho -> -infinity.
  double floor() const { return 0.1 * nominal_; }

  GainValue eval(double rho) const;

 private:
  GainFamily family_ = GainFamily::kExponential;
  double nominal_ = 1.0;
  double tau_ = 1.0;
};

// Throws DomainError for the rational family with rho > 0.
GainValue gain_eval(const GainFunction& g, double rho);

enum class LawVariant {
  kTheorem1,    // gamma_dot equal to the rate bound (needs the true theta)
  kCorollary1,  // three-case law
  kLogEnergy,    // three-case law with the log-energy stabilizing branch
  kLeakage,     // first-order rho dynamics with leakage
  kMonolithic,  // single shared gain for all parameters
  kAdversarial, // negative control: destabilizing branch with flipped sign,
                // capped at the nominal gain
};

std::string_view to_string(LawVariant v);
LawVariant parse_law_variant(std::string_view name);

struct AdaptConfig {
  LawVariant variant = LawVariant::kCorollary1;
  GainFamily family = GainFamily::kExponential;
  Vector nominal;    // gamma_bar_i >= 0; zero freezes parameter i
  double tau = 1.0;  // exponential family time constant
  Vector eta;        // eta_i > max_error_i^2
  Vector leak_rate;  // lambda_i > 0 (leakage only)
  double composite_weight = 0.0;  // beta >= 0
  double filter_pole = 10.0;      // a > 0
  Matrix matched_gain;            // Gamma, symmetric positive definite
  double energy_offset = 1.0;     // c > 0 in log(V + c) and the baseline
  bool projection = true;
  bool matched = false;
  bool composite = false;

  // Default configuration for a p-parameter box with q matched parameters:
  // gamma_bar = 1, eta = 10 + width^2, lambda = 1, Gamma = I.
  static AdaptConfig defaults(const plant::ParamBox& theta_box, int matched_dim);

  // Throws ConfigError naming the violated invariant.
  void validate(const plant::ParamBox& theta_box, int matched_dim) const;

  bool adaptation_enabled(int i) const { return nominal[i] > 0; }
  GainFunction gain(int i) const { return {family, nominal[i], tau}; }
  // Shared scaling function of the single-gain baseline (nominal 1).
  GainFunction shared_gain() const { return {family, 1.0, tau}; }
  bool per_parameter() const { return variant != LawVariant::kMonolithic; }
  // Whether rho is held at or below zero after every step.
  bool caps_at_nominal() const {
    return variant != LawVariant::kLeakage;
  }
};

// -diag(gamma) Delta dV/dx
Vector theta_dot_unmatched(const Vector& gamma, const Matrix& delta,
                           const Vector& grad_x);

// w_i = dV/dth_i * [Delta dV/dx]_i
Vector transient_signal(const Vector& grad_theta, const Matrix& delta,
                        const Vector& grad_x);

// Upper bound on gamma_dot_i: -2 gamma^2 s / (eta - err^2). Throws
// ConfigError when eta <= err^2.
double gain_rate_bound(double gamma, double eta, double theta_err, double s);

// Three-case law. `floor` is the gain floor c_i; `max_err` the box width.
double corollary1_update(double nominal, double floor, double eta,
                         double max_err, double gamma, double s);

// Stabilizing branch replaced by -2 c^2/eta * (dV/dth_i / (V + offset)) *
// thdot_i; destabilizing and capped branches as in corollary1_update.
double log_form_update(double nominal, double floor, double eta,
                       double max_err, double gamma, double s,
                       double energy, double offset);

// d/dth log(V + offset) = grad_theta / (V + offset).
Vector log_energy_gradient(double energy, const Vector& grad_theta,
                           double offset);

// gamma_dot / g'(rho).
double rho_dot_from_gain_rate(const GainFunction& g, double rho,
                              double gamma_rate);

// 2 g(rho)^2 / g'(rho) * (-lambda rho + K w), K = nominal/(eta - max_err^2)
// when w < 0 and 0 otherwise.
double leakage_rho_dot(const GainFunction& g, double rho, double w,
                       double lambda, double eta, double max_err);

// -Gamma Psi (B^T dV/dx), Psi in R^{q x m}.
Vector matched_phi_dot(const Matrix& gain, const Matrix& input_matrix,
                       const Matrix& psi, const Vector& grad_x);

// -diag(gamma) (Delta dV/dx + beta W eps).
Vector composite_theta_dot(const Vector& gamma, const Matrix& delta,
                           const Vector& grad_x, double beta, const Matrix& W,
                           const Vector& eps);

// First-order filter a/(s + a) applied to both sides of the plant equation
//   xdot - f - B u = (-Delta)^T theta.
// State: xi (filtered x, started at x(0)), drive (filtered f + B u), and the
// filtered regressor W (p x n), both started at zero. Then
//   y_f = a (x - xi) - drive = W^T theta,  eps = W^T theta_hat - y_f.
struct FilterState {
  Vector xi;
  Vector drive;
  Matrix W;

  static FilterState initial(const Vector& x0, int param_dim);
  int packed_size() const {
    return static_cast<int>(xi.size() + drive.size() + W.size());
  }
  void pack(Eigen::Ref<Vector> out) const;
  static FilterState unpack(const Eigen::Ref<const Vector>& in, int state_dim,
                            int param_dim);
};

FilterState filter_derivative(const plant::SystemModel& model,
                              const Vector& x, const Vector& u, double t,
                              const FilterState& state, double pole);

struct PredictionError {
  Matrix W;    // p x n
  Vector eps;  // n
};

PredictionError prediction_error(const FilterState& state, const Vector& x,
                                 const Vector& theta_hat, double pole);

// Runs the filter along a sampled (t, x, u) history (inputs interpolated
// linearly, RK4 between samples) and reports W and eps at the final sample.
PredictionError prediction_error_provider(const plant::SystemModel& model,
                                          std::span<const double> t,
                                          std::span<const Vector> x,
                                          std::span<const Vector> u,
                                          const Vector& theta_hat, double pole);

struct MonolithicRates {
  Vector theta_rate;
  double rho_rate = 0;
};

// Shared-gain law: thdot = -v(rho) Gamma Delta dV/dx and
// rho_dot = -(v/v') (1/(V + c)) dV/dth^T thdot.
MonolithicRates monolithic_update(const GainFunction& shaping,
                                  const Matrix& gain, const Matrix& delta,
                                  const Vector& grad_x,
                                  const Vector& grad_theta, double energy,
                                  double offset, double rho);

double monolithic_rho_dot(const GainFunction& shaping, double rho,
                          double energy, double offset, double transient);

// Box-face projection. Requires theta_hat inside the box (ContractViolation
// otherwise).
Vector project(const plant::ParamBox& box, const Vector& theta_hat,
               const Vector& rate);

// Same rule, but tolerates estimates slightly outside the box (intermediate
// integrator stages): coordinates at or beyond a face lose outward motion.
Vector project_lenient(const plant::ParamBox& box, const Vector& theta_hat,
                       const Vector& rate);

}  // namespace uclf_adapt::adapt
