#include "uclf_adapt/adapt.hpp"

#include <cmath>
#include <sstream>

#include "uclf_adapt/errors.hpp"

namespace uclf_adapt::adapt {

std::string_view to_string(GainFamily family) {
  return family == GainFamily::kExponential ? "exponential" : "rational";
}

GainFamily parse_gain_family(std::string_view name) {
  if (name == "exponential") return GainFamily::kExponential;
  if (name == "rational") return GainFamily::kRational;
  throw ConfigError("unknown gain family '" + std::string(name) +
                    "' (expected exponential|rational)");
}

std::string_view to_string(LawVariant v) {
  switch (v) {
    case LawVariant::kTheorem1: return "theorem1";
    case LawVariant::kCorollary1: return "corollary1";
    case LawVariant::kLogEnergy: return "log_energy";
    case LawVariant::kLeakage: return "leakage";
    case LawVariant::kMonolithic: return "monolithic";
    case LawVariant::kAdversarial: return "adversarial";
  }
  return "?";
}

LawVariant parse_law_variant(std::string_view name) {
  for (auto v : {LawVariant::kTheorem1, LawVariant::kCorollary1,
                 LawVariant::kLogEnergy, LawVariant::kLeakage,
                 LawVariant::kMonolithic, LawVariant::kAdversarial}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown law variant '" + std::string(name) + "'");
}

GainFunction::GainFunction(GainFamily family, double nominal, double tau)
    : family_(family), nominal_(nominal), tau_(tau) {
  if (!(nominal > 0) || !std::isfinite(nominal))
    throw ContractViolation("gain function: nominal gain must be > 0");
  if (family == GainFamily::kExponential && (!(tau > 0) || !std::isfinite(tau)))
    throw ContractViolation("gain function: tau must be > 0");
}

GainValue GainFunction::eval(double rho) const {
  if (!std::isfinite(rho)) throw DomainError("gain function: rho not finite");
  if (family_ == GainFamily::kExponential) {
    const double e = std::exp(rho / tau_);
    return {nominal_ * (0.9 * e + 0.1), nominal_ * 0.9 * e / tau_};
  }
  if (rho > 0)
    throw DomainError("rational gain function is only admissible for rho <= 0");
  const double d = rho * rho + 1.0;
  return {nominal_ * (0.9 / d + 0.1), -nominal_ * 1.8 * rho / (d * d)};
}

GainValue gain_eval(const GainFunction& g, double rho) { return g.eval(rho); }

// --- configuration ---------------------------------------------------------

AdaptConfig AdaptConfig::defaults(const plant::ParamBox& theta_box,
                                  int matched_dim) {
  AdaptConfig c;
  const int p = theta_box.dim();
  c.nominal = Vector::Ones(p);
  c.eta = (10.0 + theta_box.max_error().array().square()).matrix();
  c.leak_rate = Vector::Ones(p);
  c.matched_gain = Matrix::Identity(matched_dim, matched_dim);
  c.matched = matched_dim > 0;
  return c;
}

void AdaptConfig::validate(const plant::ParamBox& theta_box,
                           int matched_dim) const {
  const int p = theta_box.dim();
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (nominal.size() != p) fail("adapt.gamma_bar: expected " + std::to_string(p) + " entries");
  if (eta.size() != p) fail("adapt.eta: expected " + std::to_string(p) + " entries");
  if (leak_rate.size() != p) fail("adapt.lambda: expected " + std::to_string(p) + " entries");
  const Vector width = theta_box.max_error();
  for (int i = 0; i < p; ++i) {
    const std::string idx = "[" + std::to_string(i + 1) + "]";
    if (!(nominal[i] >= 0) || !std::isfinite(nominal[i]))
      fail("adapt.gamma_bar" + idx + ": must be >= 0");
    if (!(eta[i] > width[i] * width[i]) || !std::isfinite(eta[i])) {
      std::ostringstream os;
      os << "adapt.eta" << idx << " = " << eta[i]
         << " violates eta_i > max_error_i^2 = " << width[i] * width[i];
      fail(os.str());
    }
    if (!(leak_rate[i] > 0)) fail("adapt.lambda" + idx + ": must be > 0");
  }
  if (family == GainFamily::kExponential && !(tau > 0))
    fail("adapt.tau: must be > 0");
  if (!(composite_weight >= 0)) fail("adapt.beta: must be >= 0");
  if (!(filter_pole > 0)) fail("adapt.filter_pole: must be > 0");
  if (!(energy_offset > 0)) fail("adapt.energy_offset: must be > 0");
  if (matched && matched_dim == 0)
    fail("adapt.matched: model has no matched parameters");
  if (matched_dim > 0) {
    if (matched_gain.rows() != matched_dim || matched_gain.cols() != matched_dim)
      fail("adapt.matched_gain: expected a " + std::to_string(matched_dim) +
           "x" + std::to_string(matched_dim) + " matrix");
    if (!matched_gain.isApprox(matched_gain.transpose(), 1e-12))
      fail("adapt.matched_gain: must be symmetric");
    Eigen::LLT<Matrix> llt(matched_gain);
    if (llt.info() != Eigen::Success)
      fail("adapt.matched_gain: must be positive definite");
  }
  if (composite && matched)
    fail("adapt.composite: not supported together with matched adaptation");
  if (variant == LawVariant::kMonolithic && matched)
    fail("adapt.variant: monolithic baseline does not support matched adaptation");
  if (family == GainFamily::kRational && !caps_at_nominal() &&
      variant != LawVariant::kLeakage)
    fail("adapt.gain_family: rational family requires rho <= 0");
}

// --- laws ----------------------------------------------------------------

Vector theta_dot_unmatched(const Vector& gamma, const Matrix& delta,
                           const Vector& grad_x) {
  if (delta.rows() != gamma.size() || delta.cols() != grad_x.size())
    throw ContractViolation("theta_dot_unmatched: dimension mismatch");
  return -(gamma.array() * (delta * grad_x).array()).matrix();
}

Vector transient_signal(const Vector& grad_theta, const Matrix& delta,
                        const Vector& grad_x) {
  if (delta.rows() != grad_theta.size() || delta.cols() != grad_x.size())
    throw ContractViolation("transient_signal: dimension mismatch");
  return (grad_theta.array() * (delta * grad_x).array()).matrix();
}

double gain_rate_bound(double gamma, double eta, double theta_err, double s) {
  const double room = eta - theta_err * theta_err;
  if (!(room > 0))
    throw ConfigError("gain rate bound: eta must exceed the squared estimation error");
  return -2.0 * gamma * gamma * s / room;
}

namespace {

bool at_nominal(double gamma, double nominal) {
  return gamma >= nominal || std::abs(gamma - nominal) <= 1e-12 * nominal;
}

}  // namespace

double corollary1_update(double nominal, double floor, double eta,
                         double max_err, double gamma, double s) {
  const double room = eta - max_err * max_err;
  if (!(room > 0) || !(eta > 0))
    throw ConfigError("three-case law: eta must exceed the squared maximum error");
  if (s > 0) return -2.0 * nominal * nominal * s / room;
  if (at_nominal(gamma, nominal)) return 0.0;
  return -2.0 * floor * floor * s / eta;
}

double log_form_update(double nominal, double floor, double eta,
                       double max_err, double gamma, double s, double energy,
                       double offset) {
  if (s > 0 || at_nominal(gamma, nominal))
    return corollary1_update(nominal, floor, eta, max_err, gamma, s);
  if (!(offset > 0)) throw ContractViolation("log form: offset must be > 0");
  return -2.0 * floor * floor * s / (eta * (energy + offset));
}

Vector log_energy_gradient(double energy, const Vector& grad_theta,
                           double offset) {
  return grad_theta / (energy + offset);
}

double rho_dot_from_gain_rate(const GainFunction& g, double rho,
                              double gamma_rate) {
  if (gamma_rate == 0.0) return 0.0;
  const double slope = g.eval(rho).slope;
  if (!(slope > 0)) throw DomainError("gain slope must be positive");
  return gamma_rate / slope;
}

double leakage_rho_dot(const GainFunction& g, double rho, double w,
                       double lambda, double eta, double max_err) {
  const double room = eta - max_err * max_err;
  if (!(room > 0)) throw ConfigError("leakage law: eta must exceed max_error^2");
  if (!(lambda > 0)) throw ConfigError("leakage law: lambda must be > 0");
  const double k = w < 0 ? g.nominal() / room : 0.0;
  const double input = -lambda * rho + k * w;
  if (input == 0.0) return 0.0;
  const auto gv = g.eval(rho);
  return 2.0 * gv.gamma * gv.gamma / gv.slope * input;
}

Vector matched_phi_dot(const Matrix& gain, const Matrix& input_matrix,
                       const Matrix& psi, const Vector& grad_x) {
  if (input_matrix.rows() != grad_x.size() ||
      psi.cols() != input_matrix.cols() || gain.rows() != psi.rows() ||
      gain.cols() != psi.rows())
    throw ContractViolation("matched_phi_dot: dimension mismatch");
  return -gain * (psi * (input_matrix.transpose() * grad_x));
}

Vector composite_theta_dot(const Vector& gamma, const Matrix& delta,
                           const Vector& grad_x, double beta, const Matrix& W,
                           const Vector& eps) {
  if (delta.rows() != gamma.size() || delta.cols() != grad_x.size() ||
      W.rows() != gamma.size() || W.cols() != eps.size())
    throw ContractViolation("composite_theta_dot: dimension mismatch");
  Vector drive = delta * grad_x;
  if (beta != 0.0) drive += beta * (W * eps);
  return -(gamma.array() * drive.array()).matrix();
}

// --- prediction-error filter ----------------------------------------------

FilterState FilterState::initial(const Vector& x0, int param_dim) {
  return {x0, Vector::Zero(x0.size()),
          Matrix::Zero(param_dim, static_cast<int>(x0.size()))};
}

void FilterState::pack(Eigen::Ref<Vector> out) const {
  const auto n = xi.size();
  out.segment(0, n) = xi;
  out.segment(n, n) = drive;
  out.segment(2 * n, W.size()) = W.reshaped();
}

FilterState FilterState::unpack(const Eigen::Ref<const Vector>& in,
                                int state_dim, int param_dim) {
  FilterState s;
  s.xi = in.segment(0, state_dim);
  s.drive = in.segment(state_dim, state_dim);
  s.W = in.segment(2 * state_dim, state_dim * param_dim)
            .reshaped(param_dim, state_dim);
  return s;
}

FilterState filter_derivative(const plant::SystemModel& model,
                              const Vector& x, const Vector& u, double t,
                              const FilterState& state, double pole) {
  FilterState d;
  d.xi = pole * (x - state.xi);
  d.drive =
      pole * (model.drift(x, t) + model.input_matrix(x, t) * u - state.drive);
  d.W = pole * (-model.unmatched_regressor(x, t) - state.W);
  return d;
}

PredictionError prediction_error(const FilterState& state, const Vector& x,
                                 const Vector& theta_hat, double pole) {
  const Vector measured = pole * (x - state.xi) - state.drive;
  return {state.W, state.W.transpose() * theta_hat - measured};
}

PredictionError prediction_error_provider(const plant::SystemModel& model,
                                          std::span<const double> t,
                                          std::span<const Vector> x,
                                          std::span<const Vector> u,
                                          const Vector& theta_hat,
                                          double pole) {
  if (t.empty() || t.size() != x.size() || t.size() != u.size())
    throw ContractViolation("prediction_error_provider: inconsistent history");
  if (!(pole > 0)) throw ContractViolation("prediction_error_provider: pole must be > 0");
  const int n = model.state_dim();
  const int p = model.unmatched_dim();
  FilterState s = FilterState::initial(x[0], p);
  Vector packed(s.packed_size());

  auto deriv = [&](double tq, const Vector& xq, const Vector& uq,
                   const Vector& y) {
    const auto fs = FilterState::unpack(y, n, p);
    Vector out(y.size());
    filter_derivative(model, xq, uq, tq, fs, pole).pack(out);
    return out;
  };

  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double h = t[k + 1] - t[k];
    if (!(h > 0)) throw ContractViolation("prediction_error_provider: time not increasing");
    const Vector xm = 0.5 * (x[k] + x[k + 1]);
    const Vector um = 0.5 * (u[k] + u[k + 1]);
    s.pack(packed);
    const Vector k1 = deriv(t[k], x[k], u[k], packed);
    const Vector k2 = deriv(t[k] + h / 2, xm, um, packed + h / 2 * k1);
    const Vector k3 = deriv(t[k] + h / 2, xm, um, packed + h / 2 * k2);
    const Vector k4 = deriv(t[k + 1], x[k + 1], u[k + 1], packed + h * k3);
    packed += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    s = FilterState::unpack(packed, n, p);
  }
  return prediction_error(s, x.back(), theta_hat, pole);
}

// --- single-gain baseline ---------------------------------------------------

double monolithic_rho_dot(const GainFunction& shaping, double rho,
                          double energy, double offset, double transient) {
  if (!(offset > 0)) throw ContractViolation("monolithic law: c must be > 0");
  if (transient == 0.0) return 0.0;
  const auto gv = shaping.eval(rho);
  return -(gv.gamma / gv.slope) * transient / (energy + offset);
}

MonolithicRates monolithic_update(const GainFunction& shaping,
                                  const Matrix& gain, const Matrix& delta,
                                  const Vector& grad_x,
                                  const Vector& grad_theta, double energy,
                                  double offset, double rho) {
  if (gain.rows() != delta.rows() || gain.cols() != delta.rows() ||
      delta.cols() != grad_x.size() || grad_theta.size() != delta.rows())
    throw ContractViolation("monolithic_update: dimension mismatch");
  MonolithicRates r;
  r.theta_rate = -shaping.eval(rho).gamma * (gain * (delta * grad_x));
  r.rho_rate = monolithic_rho_dot(shaping, rho, energy, offset,
                                  grad_theta.dot(r.theta_rate));
  return r;
}

// --- projection ------------------------------------------------------------

Vector project_lenient(const plant::ParamBox& box, const Vector& theta_hat,
                       const Vector& rate) {
  if (theta_hat.size() != box.dim() || rate.size() != box.dim())
    throw ContractViolation("project: dimension mismatch");
  Vector out = rate;
  for (int i = 0; i < box.dim(); ++i) {
    if ((theta_hat[i] >= box.hi()[i] && rate[i] > 0) ||
        (theta_hat[i] <= box.lo()[i] && rate[i] < 0))
      out[i] = 0.0;
  }
  return out;
}

Vector project(const plant::ParamBox& box, const Vector& theta_hat,
               const Vector& rate) {
  if (!box.contains(theta_hat))
    throw ContractViolation("project: estimate outside the parameter box");
  return project_lenient(box, theta_hat, rate);
}

}  // namespace uclf_adapt::adapt
