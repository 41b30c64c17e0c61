#pragma once

// Closed-loop simulation: plant + uclf controller + adaptation integrated as
// one augmented ODE, plus the Lyapunov monitors that audit a finished run.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uclf_adapt/adapt.hpp"
#include "uclf_adapt/numkit.hpp"
#include "uclf_adapt/plant.hpp"
#include "uclf_adapt/uclf.hpp"

namespace uclf_adapt::sim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Scenario {
  std::string name;
  plant::ModelPtr model;
  uclf::FamilyPtr family;
  adapt::AdaptConfig adapt;
  numkit::IntegratorSpec integrator;
  // Sampling interval of the trace for adaptive integration (fixed-step runs
  // record every step).
  double sample_interval = 1e-2;
  plant::ParamBox theta_box;
  plant::ParamBox phi_box;
  plant::TrueParams truth;
  Vector x0;
  Vector theta_hat0;
  Vector phi_hat0;
  double settle_tol = 1e-2;

  // Checks every cross-module invariant before integration starts.
  void validate() const;
};

// Built-in scenario for a model id, with the shipped defaults.
Scenario default_scenario(const std::string& model_id);

struct Trace {
  int n = 0, m = 0, p = 0, q = 0;
  std::vector<double> t;
  std::vector<Vector> x, u, theta_hat, phi_hat, rho, gamma, gamma_rate, s, w;
  std::vector<double> V, Q, Vc;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
};

struct Metrics {
  std::optional<double> settling_time;  // nullopt: never settles
  double final_state_norm = 0;
  double max_state_norm = 0;
  std::vector<double> gain_reduction;     // (gamma_bar - min gamma)/gamma_bar
  std::vector<double> final_gain_error;   // |gamma(T) - gamma_bar|
  double max_vc_increase = 0;             // max_k Vc[k+1] - Vc[k]
  bool converged = false;                 // final norm <= settle tol
};

struct RunResult {
  Trace trace;
  Metrics metrics;
};

// Integration failure during a scenario. The partial trace is kept.
class ScenarioDiverged : public std::runtime_error {
 public:
  ScenarioDiverged(const std::string& what, RunResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunResult& partial() const noexcept { return partial_; }

 private:
  RunResult partial_;
};

// Everything the right-hand side computes at one augmented state.
struct LoopEval {
  Vector derivative;  // of the packed augmented state
  Vector u;           // applied input
  Vector gamma, gamma_rate, s, w, rho;
  double V = 0, Q = 0;
};

// Augmented state layout: [x | theta_hat | phi_hat | rho | filter].
class ClosedLoop {
 public:
  explicit ClosedLoop(const Scenario& scenario);

  int size() const { return size_; }
  int rho_dim() const { return rho_dim_; }

  Vector initial_state() const;
  LoopEval evaluate(double t, const Vector& state) const;
  Vector rhs(double t, const Vector& state) const {
    return evaluate(t, state).derivative;
  }
  // Re-clamps estimates into their boxes and rho to <= 0 where the law caps
  // gains at their nominal values.
  void post_step(double t, Vector& state) const;

  // Unpacked views.
  Vector x(const Vector& s) const { return s.segment(0, n_); }
  Vector theta_hat(const Vector& s) const { return s.segment(n_, p_); }
  Vector phi_hat(const Vector& s) const { return s.segment(n_ + p_, q_); }
  Vector rho(const Vector& s) const;

 private:
  const Scenario& sc_;
  int n_, m_, p_, q_;
  int rho_dim_;
  int filter_offset_;
  int size_;
};

// Lyapunov-like function of the active law, evaluated with the true
// parameters (oracle mode). For the leakage law this is the algebraic part.
double lyapunov_value(const Scenario& scenario, double energy,
                      const Vector& theta_hat, const Vector& phi_hat,
                      const Vector& gamma, const Vector& rho);

RunResult run_scenario(const Scenario& scenario);

Metrics compute_metrics(const Trace& trace, const Vector& nominal_gains,
                        double settle_tol = 1e-2);

struct MonitorReport {
  std::vector<double> vc;
  double max_increase = 0;   // max_k Vc[k+1] - Vc[k]
  double max_excess = 0;     // max_k (increase - slack_k)
  std::size_t worst_index = 0;
  bool monotone = true;
};

// Per-step slack is rel_slack * (1 + |Vc[k]|). For the leakage law the
// series includes sum_i eta_i lambda_i int_t^T |rho_i| (trapezoid rule).
MonitorReport lyapunov_monitor(const Trace& trace, const Scenario& scenario,
                               double rel_slack = 1e-8);

struct GainAuditReport {
  double max_violation = 0;  // max over samples/params of gamma_dot - bound
  std::size_t worst_index = 0;
  int worst_param = -1;
  std::size_t checked = 0;
  bool passed = true;
};

// Oracle audit of the realized gain rates against
//   gamma_dot_i <= -2 gamma_i^2 s_i / (eta_i - err_i^2).
GainAuditReport audit_gain_rates(const Trace& trace, const Scenario& scenario,
                                 double slack = 1e-9);

// --- leakage filter harness --------------------------------------------------

enum class SignalKind { kZero, kPulse, kDecay, kSine };

struct SignalSpec {
  SignalKind kind = SignalKind::kPulse;
  double amplitude = -0.9;
  double duration = 5.0;   // pulse width
  double rate = 1.0;       // decay rate
  double frequency = 1.0;  // sine, rad/s

  double operator()(double t) const;
  // Parses "zero", "pulse:AMP:DURATION", "decay:AMP:RATE", "sine:AMP:FREQ".
  static SignalSpec parse(const std::string& text);
};

struct Lemma1Report {
  std::vector<double> t, rho, w;
  double sup_abs_rho = 0;
  double final_abs_rho = 0;
  // Last sample of the active input window (pulse end, else horizon).
  double rho_at_window_end = 0;
  double predicted_offset = 0;  // K * w / lambda for a pulse
  bool bounded = true;
  bool recovers = false;  // only claimed when the input vanishes
};

Lemma1Report lemma1_harness(const adapt::GainFunction& g, double lambda,
                            double k_gain, const SignalSpec& signal,
                            double horizon = 20.0, double step = 1e-3);

}  // namespace uclf_adapt::sim
