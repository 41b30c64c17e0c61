#include "uclf_adapt/simloop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "uclf_adapt/errors.hpp"

namespace uclf_adapt::sim {

using adapt::LawVariant;

// --- scenario ----------------------------------------------------------------

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!model) fail("scenario: no model");
  if (!family) fail("scenario: no uclf family");
  if (!uclf::family_matches_model(family->id(), model->id()))
    fail("uclf '" + family->id() + "' is not designed for model '" +
         model->id() + "'");
  const int n = model->state_dim();
  const int p = model->unmatched_dim();
  const int q = model->matched_dim();
  if (family->state_dim() != n || family->param_dim() != p)
    fail("uclf/model dimension mismatch");
  if (theta_box.dim() != p)
    fail("scenario.theta_box: expected " + std::to_string(p) + " intervals");
  if (phi_box.dim() != q)
    fail("scenario.phi_box: expected " + std::to_string(q) + " intervals");
  if (x0.size() != n || !x0.allFinite())
    fail("scenario.x0: expected " + std::to_string(n) + " finite entries");
  if (theta_hat0.size() != p)
    fail("scenario.theta_hat0: expected " + std::to_string(p) + " entries");
  if (!theta_box.contains(theta_hat0))
    fail("scenario.theta_hat0: initial estimate must lie in the parameter box");
  if (phi_hat0.size() != q)
    fail("scenario.phi_hat0: expected " + std::to_string(q) + " entries");
  if (!phi_box.contains(phi_hat0))
    fail("scenario.phi_hat0: initial estimate must lie in the matched box");
  if (truth.theta.size() != p || !theta_box.contains(truth.theta))
    fail("scenario.theta_true: must lie in the parameter box");
  if (truth.phi.size() != q || !phi_box.contains(truth.phi))
    fail("scenario.phi_true: must lie in the matched box");
  adapt.validate(theta_box, q);
  try {
    integrator.validate();
  } catch (const ContractViolation& e) {
    fail(e.what());
  }
  if (!(sample_interval > 0)) fail("integrator.sample_interval: must be > 0");
  if (!(settle_tol > 0)) fail("scenario.settle_tol: must be > 0");
}

Scenario default_scenario(const std::string& model_id) {
  const auto preset = plant::make_preset(model_id);
  Scenario s;
  s.name = model_id;
  s.model = preset.model;
  const std::string family_id = model_id == "eq7-split"
                                    ? std::string("eq7-backstep")
                                    : model_id + "-backstep";
  s.family = uclf::make_family(family_id, uclf::default_gains(family_id),
                               preset.theta_box);
  s.theta_box = preset.theta_box;
  s.phi_box = preset.phi_box;
  s.truth = preset.truth;
  s.adapt = adapt::AdaptConfig::defaults(preset.theta_box,
                                         preset.model->matched_dim());
  s.integrator.method = numkit::FixedStep{1e-3};
  s.integrator.horizon = 50.0;
  s.x0 = preset.x0;
  s.theta_hat0 = s.theta_box.clamp(Vector::Zero(preset.model->unmatched_dim()));
  s.phi_hat0 = s.phi_box.clamp(Vector::Zero(preset.model->matched_dim()));
  return s;
}

// --- closed loop -------------------------------------------------------------

ClosedLoop::ClosedLoop(const Scenario& scenario) : sc_(scenario) {
  n_ = sc_.model->state_dim();
  m_ = sc_.model->input_dim();
  p_ = sc_.model->unmatched_dim();
  q_ = sc_.model->matched_dim();
  rho_dim_ = sc_.adapt.per_parameter() ? p_ : 1;
  filter_offset_ = n_ + p_ + q_ + rho_dim_;
  size_ = filter_offset_ + (sc_.adapt.composite ? 2 * n_ + p_ * n_ : 0);
}

Vector ClosedLoop::initial_state() const {
  Vector s = Vector::Zero(size_);
  s.segment(0, n_) = sc_.x0;
  s.segment(n_, p_) = sc_.theta_hat0;
  s.segment(n_ + p_, q_) = sc_.phi_hat0;
  if (sc_.adapt.composite) {
    adapt::FilterState::initial(sc_.x0, p_)
        .pack(s.segment(filter_offset_, size_ - filter_offset_));
  }
  return s;
}

Vector ClosedLoop::rho(const Vector& s) const {
  const Vector r = s.segment(n_ + p_ + q_, rho_dim_);
  if (rho_dim_ == p_) return r;
  return Vector::Constant(p_, r[0]);
}

LoopEval ClosedLoop::evaluate(double t, const Vector& state) const {
  const auto& cfg = sc_.adapt;
  const auto& model = *sc_.model;
  const auto& family = *sc_.family;

  const Vector x = state.segment(0, n_);
  const Vector th = state.segment(n_, p_);
  const Vector ph = state.segment(n_ + p_, q_);
  const Vector rho_raw = state.segment(n_ + p_ + q_, rho_dim_);

  LoopEval ev;
  if (!state.allFinite()) {
    // Let the integrator report the divergence with its partial trajectory.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ev.derivative = Vector::Constant(size_, nan);
    ev.u = Vector::Constant(m_, nan);
    ev.gamma = ev.gamma_rate = ev.s = ev.w = ev.rho = Vector::Constant(p_, nan);
    ev.V = ev.Q = nan;
    return ev;
  }
  ev.derivative = Vector::Zero(size_);
  ev.V = family.value(x, th, t);
  ev.Q = family.dissipation(x, th);
  const Vector gx = family.grad_x(x, th, t);
  const Vector gth = family.grad_theta(x, th, t);

  ev.u = family.control(x, th, t);
  Matrix psi;
  if (q_ > 0) {
    psi = model.matched_regressor(x, t);
    ev.u += psi.transpose() * ph;
  }
  ev.derivative.segment(0, n_) =
      plant::eval_dynamics(model, x, ev.u, sc_.truth.theta, sc_.truth.phi, t);

  const Matrix delta = model.unmatched_regressor(x, t);
  const Vector width = sc_.theta_box.max_error();

  // Gains at the current arguments.
  ev.gamma = Vector::Zero(p_);
  Vector slope = Vector::Zero(p_);
  adapt::GainValue shared{};
  const bool capped = cfg.caps_at_nominal();
  if (cfg.per_parameter()) {
    for (int i = 0; i < p_; ++i) {
      if (!cfg.adaptation_enabled(i)) continue;
      const double r = capped ? std::min(rho_raw[i], 0.0) : rho_raw[i];
      const auto gv = cfg.gain(i).eval(r);
      ev.gamma[i] = gv.gamma;
      slope[i] = gv.slope;
    }
  } else {
    shared = cfg.shared_gain().eval(std::min(rho_raw[0], 0.0));
    ev.gamma = cfg.nominal * shared.gamma;
  }

  // Parameter update.
  Vector rate;
  if (cfg.composite) {
    const auto fs = adapt::FilterState::unpack(
        state.segment(filter_offset_, size_ - filter_offset_), n_, p_);
    const auto pe = adapt::prediction_error(fs, x, th, cfg.filter_pole);
    rate = adapt::composite_theta_dot(ev.gamma, delta, gx,
                                      cfg.composite_weight, pe.W, pe.eps);
    adapt::filter_derivative(model, x, ev.u, t, fs, cfg.filter_pole)
        .pack(ev.derivative.segment(filter_offset_, size_ - filter_offset_));
  } else {
    rate = adapt::theta_dot_unmatched(ev.gamma, delta, gx);
  }
  if (cfg.projection) rate = adapt::project_lenient(sc_.theta_box, th, rate);
  ev.derivative.segment(n_, p_) = rate;

  ev.s = (gth.array() * rate.array()).matrix();
  ev.w = adapt::transient_signal(gth, delta, gx);

  // Gain dynamics.
  ev.gamma_rate = Vector::Zero(p_);
  ev.rho = Vector::Zero(p_);
  Vector rho_rate = Vector::Zero(rho_dim_);
  if (cfg.per_parameter()) {
    for (int i = 0; i < p_; ++i) {
      ev.rho[i] = rho_raw[i];
      if (!cfg.adaptation_enabled(i)) continue;
      const auto g = cfg.gain(i);
      const double gamma = ev.gamma[i];
      const double s = ev.s[i];
      double gdot = 0.0;
      switch (cfg.variant) {
        case LawVariant::kCorollary1:
          gdot = adapt::corollary1_update(g.nominal(), g.floor(), cfg.eta[i],
                                          width[i], gamma, s);
          break;
        case LawVariant::kLogEnergy:
          gdot = adapt::log_form_update(g.nominal(), g.floor(), cfg.eta[i],
                                        width[i], gamma, s, ev.V,
                                        cfg.energy_offset);
          break;
        case LawVariant::kTheorem1: {
          const double err = th[i] - sc_.truth.theta[i];
          gdot = adapt::gain_rate_bound(gamma, cfg.eta[i], err, s);
          if (gdot > 0 && rho_raw[i] >= 0) gdot = 0.0;
          break;
        }
        case LawVariant::kAdversarial:
          if (s > 0) {
            gdot = 2.0 * g.nominal() * g.nominal() * s /
                   (cfg.eta[i] - width[i] * width[i]);
            if (rho_raw[i] >= 0) gdot = 0.0;
          } else {
            gdot = adapt::corollary1_update(g.nominal(), g.floor(), cfg.eta[i],
                                            width[i], gamma, s);
          }
          break;
        case LawVariant::kLeakage:
          rho_rate[i] = adapt::leakage_rho_dot(g, rho_raw[i], ev.w[i],
                                               cfg.leak_rate[i], cfg.eta[i],
                                               width[i]);
          gdot = slope[i] * rho_rate[i];
          break;
        case LawVariant::kMonolithic:
          break;
      }
      if (cfg.variant != LawVariant::kLeakage)
        rho_rate[i] = gdot == 0.0 ? 0.0 : gdot / slope[i];
      ev.gamma_rate[i] = gdot;
    }
  } else {
    ev.rho.setConstant(rho_raw[0]);
    if ((cfg.nominal.array() > 0).any()) {
      double r = adapt::monolithic_rho_dot(cfg.shared_gain(),
                                           std::min(rho_raw[0], 0.0), ev.V,
                                           cfg.energy_offset, ev.s.sum());
      if (r > 0 && rho_raw[0] >= 0) r = 0.0;
      rho_rate[0] = r;
      ev.gamma_rate = cfg.nominal * (shared.slope * r);
    }
  }
  ev.derivative.segment(n_ + p_ + q_, rho_dim_) = rho_rate;

  if (q_ > 0 && cfg.matched) {
    Vector phi_rate = adapt::matched_phi_dot(
        cfg.matched_gain, model.input_matrix(x, t), psi, gx);
    if (cfg.projection)
      phi_rate = adapt::project_lenient(sc_.phi_box, ph, phi_rate);
    ev.derivative.segment(n_ + p_, q_) = phi_rate;
  }
  return ev;
}

void ClosedLoop::post_step(double, Vector& state) const {
  if (sc_.adapt.projection) {
    state.segment(n_, p_) = sc_.theta_box.clamp(state.segment(n_, p_));
    if (q_ > 0)
      state.segment(n_ + p_, q_) = sc_.phi_box.clamp(state.segment(n_ + p_, q_));
  }
  if (sc_.adapt.caps_at_nominal()) {
    auto r = state.segment(n_ + p_ + q_, rho_dim_);
    r = r.cwiseMin(0.0);
  }
}

// --- monitors ----------------------------------------------------------------

double lyapunov_value(const Scenario& sc, double energy,
                      const Vector& theta_hat, const Vector& phi_hat,
                      const Vector& gamma, const Vector& rho) {
  const auto& cfg = sc.adapt;
  const Vector err = theta_hat - sc.truth.theta;
  double vc = 0.0;
  if (cfg.per_parameter()) {
    vc = energy;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      if (!cfg.adaptation_enabled(static_cast<int>(i))) continue;
      vc += 0.5 * (err[i] * err[i] - cfg.eta[i]) / gamma[i];
    }
  } else {
    const double r = rho.size() > 0 ? std::min(rho[0], 0.0) : 0.0;
    const double shaping = cfg.shared_gain().eval(r).gamma;
    vc = shaping * (energy + cfg.energy_offset);
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      if (!cfg.adaptation_enabled(static_cast<int>(i))) continue;
      vc += 0.5 * err[i] * err[i] / cfg.nominal[i];
    }
  }
  if (cfg.matched && phi_hat.size() > 0) {
    const Vector perr = phi_hat - sc.truth.phi;
    vc += 0.5 * perr.dot(cfg.matched_gain.llt().solve(perr));
  }
  return vc;
}

namespace {

void record(Trace& tr, const Scenario& sc, const ClosedLoop& loop, double t,
            const Vector& state) {
  const auto ev = loop.evaluate(t, state);
  const Vector th = loop.theta_hat(state);
  const Vector ph = loop.phi_hat(state);
  tr.t.push_back(t);
  tr.x.push_back(loop.x(state));
  tr.u.push_back(ev.u);
  tr.theta_hat.push_back(th);
  tr.phi_hat.push_back(ph);
  tr.rho.push_back(ev.rho);
  tr.gamma.push_back(ev.gamma);
  tr.gamma_rate.push_back(ev.gamma_rate);
  tr.s.push_back(ev.s);
  tr.w.push_back(ev.w);
  tr.V.push_back(ev.V);
  tr.Q.push_back(ev.Q);
  tr.Vc.push_back(lyapunov_value(sc, ev.V, th, ph, ev.gamma, ev.rho));
}

Trace build_trace(const Scenario& sc, const ClosedLoop& loop,
                  const numkit::Trajectory& traj) {
  Trace tr;
  tr.n = sc.model->state_dim();
  tr.m = sc.model->input_dim();
  tr.p = sc.model->unmatched_dim();
  tr.q = sc.model->matched_dim();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (!traj.x[k].allFinite()) break;
    record(tr, sc, loop, traj.t[k], traj.x[k]);
  }
  return tr;
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  sc.validate();
  const ClosedLoop loop(sc);
  const auto rhs = [&loop](double t, const Vector& s) { return loop.rhs(t, s); };
  const auto post = [&loop](double t, Vector& s) { loop.post_step(t, s); };

  numkit::Trajectory traj;
  try {
    if (sc.integrator.is_fixed()) {
      traj = numkit::integrate_fixed(rhs, 0.0, loop.initial_state(),
                                     sc.integrator, post);
    } else {
      const auto grid =
          numkit::uniform_grid(0.0, sc.integrator.horizon, sc.sample_interval);
      traj = numkit::integrate_adaptive(rhs, 0.0, loop.initial_state(),
                                        sc.integrator, grid, post)
                 .samples;
    }
  } catch (numkit::IntegrationDiverged& e) {
    RunResult partial;
    partial.trace = build_trace(sc, loop, e.partial());
    if (!partial.trace.empty())
      partial.metrics =
          compute_metrics(partial.trace, sc.adapt.nominal, sc.settle_tol);
    throw ScenarioDiverged(std::string("scenario '") + sc.name +
                               "': " + e.what(),
                           std::move(partial));
  }

  RunResult result;
  result.trace = build_trace(sc, loop, traj);
  result.metrics = compute_metrics(result.trace, sc.adapt.nominal, sc.settle_tol);
  return result;
}

Metrics compute_metrics(const Trace& tr, const Vector& nominal,
                        double settle_tol) {
  if (tr.empty()) throw ContractViolation("compute_metrics: empty trace");
  Metrics m;
  const std::size_t N = tr.size();

  std::optional<std::size_t> last_outside;
  for (std::size_t k = 0; k < N; ++k) {
    const double nrm = tr.x[k].norm();
    m.max_state_norm = std::max(m.max_state_norm, nrm);
    if (nrm > settle_tol) last_outside = k;
  }
  if (!last_outside) {
    m.settling_time = tr.t.front();
  } else if (*last_outside + 1 < N) {
    m.settling_time = tr.t[*last_outside + 1];
  }
  m.final_state_norm = tr.x.back().norm();
  m.converged = m.final_state_norm <= settle_tol;

  const auto p = static_cast<std::size_t>(nominal.size());
  m.gain_reduction.assign(p, 0.0);
  m.final_gain_error.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const double bar = nominal[static_cast<Eigen::Index>(i)];
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& g : tr.gamma) lowest = std::min(lowest, g[static_cast<Eigen::Index>(i)]);
    m.final_gain_error[i] = std::abs(tr.gamma.back()[static_cast<Eigen::Index>(i)] - bar);
    if (bar > 0) m.gain_reduction[i] = std::max(0.0, (bar - lowest) / bar);
  }

  m.max_vc_increase = 0.0;
  for (std::size_t k = 0; k + 1 < tr.Vc.size(); ++k)
    m.max_vc_increase = std::max(m.max_vc_increase, tr.Vc[k + 1] - tr.Vc[k]);
  return m;
}

MonitorReport lyapunov_monitor(const Trace& tr, const Scenario& sc,
                               double rel_slack) {
  MonitorReport rep;
  const std::size_t N = tr.size();
  rep.vc.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    rep.vc[k] = lyapunov_value(sc, tr.V[k], tr.theta_hat[k], tr.phi_hat[k],
                               tr.gamma[k], tr.rho[k]);
  }
  if (sc.adapt.variant == LawVariant::kLeakage && N > 1) {
    // Tail integral sum_i eta_i lambda_i int_{t_k}^{T} |rho_i|.
    std::vector<double> weighted(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      for (Eigen::Index i = 0; i < tr.rho[k].size(); ++i) {
        if (!sc.adapt.adaptation_enabled(static_cast<int>(i))) continue;
        weighted[k] += sc.adapt.eta[i] * sc.adapt.leak_rate[i] *
                       std::abs(tr.rho[k][i]);
      }
    }
    double tail = 0.0;
    for (std::size_t k = N - 1; k-- > 0;) {
      tail += 0.5 * (weighted[k] + weighted[k + 1]) * (tr.t[k + 1] - tr.t[k]);
      rep.vc[k] += tail;
    }
  }
  rep.max_increase = 0.0;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < N; ++k) {
    const double inc = rep.vc[k + 1] - rep.vc[k];
    const double excess = inc - rel_slack * (1.0 + std::abs(rep.vc[k]));
    rep.max_increase = std::max(rep.max_increase, inc);
    if (excess > rep.max_excess) {
      rep.max_excess = excess;
      rep.worst_index = k;
    }
  }
  if (N < 2) rep.max_excess = 0.0;
  rep.monotone = rep.max_excess <= 0.0;
  return rep;
}

GainAuditReport audit_gain_rates(const Trace& tr, const Scenario& sc,
                                 double slack) {
  GainAuditReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  if (!sc.adapt.per_parameter()) {
    rep.max_violation = 0.0;
    return rep;
  }
  for (std::size_t k = 0; k < tr.size(); ++k) {
    for (int i = 0; i < tr.p; ++i) {
      if (!sc.adapt.adaptation_enabled(i)) continue;
      const double err = tr.theta_hat[k][i] - sc.truth.theta[i];
      double violation;
      try {
        const double bound =
            adapt::gain_rate_bound(tr.gamma[k][i], sc.adapt.eta[i], err, tr.s[k][i]);
        violation = tr.gamma_rate[k][i] - bound;
      } catch (const ConfigError&) {
        violation = std::numeric_limits<double>::infinity();
      }
      ++rep.checked;
      if (violation > rep.max_violation) {
        rep.max_violation = violation;
        rep.worst_index = k;
        rep.worst_param = i;
      }
    }
  }
  if (rep.checked == 0) rep.max_violation = 0.0;
  rep.passed = rep.max_violation <= slack;
  return rep;
}

// --- leakage filter harness --------------------------------------------------

double SignalSpec::operator()(double t) const {
  switch (kind) {
    case SignalKind::kZero: return 0.0;
    case SignalKind::kPulse: return t < duration ? amplitude : 0.0;
    case SignalKind::kDecay: return amplitude * std::exp(-rate * t);
    case SignalKind::kSine: return amplitude * std::sin(frequency * t);
  }
  return 0.0;
}

SignalSpec SignalSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto number = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size() || !std::isfinite(v)) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("signal spec '" + text + "': bad number in field " +
                        std::to_string(i + 1));
    }
  };
  SignalSpec s;
  if (parts.empty()) throw ConfigError("empty signal spec");
  const std::string& kind = parts[0];
  if (kind == "zero" && parts.size() == 1) {
    s.kind = SignalKind::kZero;
    s.amplitude = 0.0;
  } else if (kind == "pulse" && parts.size() == 3) {
    s.kind = SignalKind::kPulse;
    s.amplitude = number(1);
    s.duration = number(2);
    if (!(s.duration >= 0)) throw ConfigError("pulse duration must be >= 0");
  } else if (kind == "decay" && parts.size() == 3) {
    s.kind = SignalKind::kDecay;
    s.amplitude = number(1);
    s.rate = number(2);
    if (!(s.rate > 0)) throw ConfigError("decay rate must be > 0");
  } else if (kind == "sine" && parts.size() == 3) {
    s.kind = SignalKind::kSine;
    s.amplitude = number(1);
    s.frequency = number(2);
  } else {
    throw ConfigError("signal spec '" + text +
                      "' (expected zero | pulse:AMP:DURATION | decay:AMP:RATE | "
                      "sine:AMP:FREQ)");
  }
  return s;
}

Lemma1Report lemma1_harness(const adapt::GainFunction& g, double lambda,
                            double k_gain, const SignalSpec& signal,
                            double horizon, double step) {
  if (!(lambda > 0)) throw ConfigError("lemma1: lambda must be > 0");
  if (!(k_gain >= 0)) throw ConfigError("lemma1: K must be >= 0");
  auto rhs = [&](double t, const Vector& y) {
    const double w = signal(t);
    const double input = -lambda * y[0] + (w < 0 ? k_gain * w : 0.0);
    Vector d(1);
    if (input == 0.0) {
      d[0] = 0.0;
    } else {
      const auto gv = g.eval(std::min(y[0], 0.0));
      d[0] = 2.0 * gv.gamma * gv.gamma / gv.slope * input;
    }
    return d;
  };
  numkit::IntegratorSpec spec;
  spec.method = numkit::FixedStep{step};
  spec.horizon = horizon;
  const auto traj = numkit::integrate_fixed(rhs, 0.0, Vector::Zero(1), spec);

  Lemma1Report rep;
  double sup_w = 0.0;
  const double window_end =
      signal.kind == SignalKind::kPulse ? signal.duration : horizon;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double r = traj.x[k][0];
    const double w = signal(traj.t[k]);
    rep.t.push_back(traj.t[k]);
    rep.rho.push_back(r);
    rep.w.push_back(w);
    rep.sup_abs_rho = std::max(rep.sup_abs_rho, std::abs(r));
    if (w < 0) sup_w = std::max(sup_w, std::abs(k_gain * w));
    if (traj.t[k] <= window_end + 1e-12) rep.rho_at_window_end = r;
  }
  rep.final_abs_rho = std::abs(rep.rho.back());
  if (signal.kind == SignalKind::kPulse && signal.amplitude < 0)
    rep.predicted_offset = k_gain * signal.amplitude / lambda;
  // Comparison-system bound: |rho| <= sup|K w| / lambda when rho(0) = 0.
  rep.bounded = std::isfinite(rep.sup_abs_rho) &&
                rep.sup_abs_rho <= sup_w / lambda * (1 + 1e-9) + 1e-15;
  const bool input_vanishes = signal.kind != SignalKind::kSine;
  rep.recovers = input_vanishes && rep.final_abs_rho <= 1e-6;
  return rep;
}

}  // namespace uclf_adapt::sim
