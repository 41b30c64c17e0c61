#include "uclf_adapt/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uclf_adapt/errors.hpp"

namespace uclf_adapt::numkit {
namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string at_time(const char* what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t=" << t;
  return os.str();
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (fifth minus embedded fourth order weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

Vector hermite(double t0, const Vector& x0, const Vector& f0, double t1,
               const Vector& x1, const Vector& f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * x0 + h10 * h * f0 + h01 * x1 + h11 * h * f1;
}

}  // namespace

void IntegratorSpec::validate() const {
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw ContractViolation("integrator: horizon must be > 0");
  if (const auto* f = std::get_if<FixedStep>(&method)) {
    if (!(f->step > 0) || !std::isfinite(f->step))
      throw ContractViolation("integrator: step must be > 0");
    return;
  }
  const auto& a = std::get<AdaptiveStep>(method);
  if (!(a.rel_tol > 0) || !(a.abs_tol > 0))
    throw ContractViolation("integrator: tolerances must be > 0");
  if (!(a.min_step > 0) || !(a.max_step > 0))
    throw ContractViolation("integrator: step bounds must be > 0");
  if (a.min_step > a.max_step)
    throw ContractViolation("integrator: min_step must be <= max_step");
}

Trajectory integrate_fixed(const Rhs& rhs, double t0, const Vector& x0,
                           const IntegratorSpec& spec,
                           const PostStep& post_step) {
  spec.validate();
  if (!spec.is_fixed())
    throw ContractViolation("integrate_fixed: spec is not fixed-step");
  const double h = std::get<FixedStep>(spec.method).step;
  const auto n_steps = static_cast<std::size_t>(
      std::max(1.0, std::ceil(spec.horizon / h - 1e-9)));

  Trajectory out;
  out.t.reserve(n_steps + 1);
  out.x.reserve(n_steps + 1);
  if (!all_finite(x0))
    throw IntegrationDiverged(at_time("non-finite initial state", t0), t0, {});
  out.t.push_back(t0);
  out.x.push_back(x0);

  Vector x = x0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const double t_next = (k + 1 == n_steps)
                              ? t0 + spec.horizon
                              : t0 + static_cast<double>(k + 1) * h;
    const double dt = t_next - t;
    const Vector k1 = rhs(t, x);
    const Vector k2 = rhs(t + dt / 2, x + dt / 2 * k1);
    const Vector k3 = rhs(t + dt / 2, x + dt / 2 * k2);
    const Vector k4 = rhs(t_next, x + dt * k3);
    Vector next = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!all_finite(next)) {
      throw IntegrationDiverged(at_time("integration diverged", t_next), t,
                                std::move(out));
    }
    if (post_step) post_step(t_next, next);
    x = std::move(next);
    out.t.push_back(t_next);
    out.x.push_back(x);
  }
  return out;
}

AdaptiveResult integrate_adaptive(const Rhs& rhs, double t0, const Vector& x0,
                                  const IntegratorSpec& spec,
                                  std::span<const double> output_grid,
                                  const PostStep& post_step) {
  spec.validate();
  if (spec.is_fixed())
    throw ContractViolation("integrate_adaptive: spec is not adaptive");
  const auto& cfg = std::get<AdaptiveStep>(spec.method);
  const double t_end = t0 + spec.horizon;
  for (std::size_t i = 0; i < output_grid.size(); ++i) {
    if (output_grid[i] < t0 - 1e-12 || output_grid[i] > t_end + 1e-12)
      throw ContractViolation("integrate_adaptive: output grid outside span");
    if (i > 0 && output_grid[i] <= output_grid[i - 1])
      throw ContractViolation("integrate_adaptive: output grid not ascending");
  }

  AdaptiveResult result;
  Trajectory& out = result.samples;
  std::size_t next_out = 0;
  const bool dense = !output_grid.empty();

  Vector x = x0;
  double t = t0;
  Vector f = rhs(t, x);
  if (!all_finite(x) || !all_finite(f))
    throw IntegrationDiverged(at_time("non-finite initial state", t0), t0, {});

  auto emit_until = [&](double t_hi, const Vector& x_lo, const Vector& f_lo,
                        double t_lo, const Vector& x_hi, const Vector& f_hi) {
    while (next_out < output_grid.size() &&
           output_grid[next_out] <= t_hi + 1e-12) {
      const double tq = output_grid[next_out];
      out.t.push_back(tq);
      if (tq <= t_lo) {
        out.x.push_back(x_lo);
      } else if (tq >= t_hi) {
        out.x.push_back(x_hi);
      } else {
        out.x.push_back(hermite(t_lo, x_lo, f_lo, t_hi, x_hi, f_hi, tq));
      }
      ++next_out;
    }
  };

  if (dense) {
    emit_until(t0, x, f, t0, x, f);
  } else {
    out.t.push_back(t0);
    out.x.push_back(x);
  }

  // Initial step from the Hairer-Wanner heuristic, clipped to the bounds.
  const double scale0 = cfg.abs_tol + cfg.rel_tol * x.norm();
  double h = f.norm() > 0 ? 0.01 * scale0 / (f.norm() * cfg.rel_tol + 1e-300)
                          : cfg.max_step;
  h = std::clamp(h, cfg.min_step, cfg.max_step);

  const double n = static_cast<double>(x.size());
  while (t < t_end - 1e-14 * std::max(1.0, std::abs(t_end))) {
    h = std::min(h, t_end - t);
    const bool last = (t + h >= t_end);

    const Vector k1 = f;
    const Vector k2 = rhs(t + c2 * h, x + h * (a21 * k1));
    const Vector k3 = rhs(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    const Vector k4 =
        rhs(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = rhs(t + c5 * h,
                          x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 =
        rhs(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                            a65 * k5));
    Vector x_new =
        x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = last ? t_end : t + h;
    const Vector k7 = rhs(t_new, x_new);
    const Vector err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = std::numeric_limits<double>::infinity();
    if (all_finite(x_new) && all_finite(k7) && all_finite(err)) {
      double acc = 0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double sc =
            cfg.abs_tol +
            cfg.rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
        acc += (err[i] / sc) * (err[i] / sc);
      }
      err_norm = std::sqrt(acc / n);
    }

    if (err_norm <= 1.0) {
      ++result.stats.accepted;
      Vector f_new = k7;
      if (post_step) {
        const Vector before = x_new;
        post_step(t_new, x_new);
        if (x_new != before) f_new = rhs(t_new, x_new);
      }
      if (!all_finite(x_new) || !all_finite(f_new)) {
        throw IntegrationDiverged(at_time("integration diverged", t_new), t,
                                  std::move(out));
      }
      if (dense) {
        emit_until(t_new, x, f, t, x_new, f_new);
      } else {
        out.t.push_back(t_new);
        out.x.push_back(x_new);
      }
      t = t_new;
      x = std::move(x_new);
      f = std::move(f_new);
      const double factor =
          err_norm == 0 ? 5.0
                        : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      h = std::clamp(h * factor, cfg.min_step, cfg.max_step);
    } else {
      ++result.stats.rejected;
      const double factor =
          std::isfinite(err_norm)
              ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 1.0)
              : 0.1;
      const double h_try = h * factor;
      if (h_try < cfg.min_step) {
        throw StepUnderflow(at_time("step size underflow (stiff or escaping)", t),
                            t, std::move(out));
      }
      h = h_try;
    }
  }
  if (dense) emit_until(t_end + 1.0, x, f, t, x, f);
  return result;
}

std::vector<double> uniform_grid(double t0, double horizon, double dt) {
  if (!(dt > 0) || !(horizon > 0))
    throw ContractViolation("uniform_grid: dt and horizon must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double tk = t0 + static_cast<double>(k) * dt;
    if (tk > t0 + horizon + 1e-12) break;
    grid.push_back(std::min(tk, t0 + horizon));
  }
  if (grid.back() < t0 + horizon - 1e-12) grid.push_back(t0 + horizon);
  return grid;
}

Vector finite_diff_gradient(const ScalarField& field, const Vector& point,
                            double h) {
  if (!(h > 0)) throw ContractViolation("finite_diff_gradient: h must be > 0");
  Vector grad(point.size());
  Vector probe = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + h;
    const double up = field(probe);
    probe[i] = point[i] - h;
    const double down = field(probe);
    probe[i] = point[i];
    if (!std::isfinite(up) || !std::isfinite(down))
      throw DomainError("finite_diff_gradient: non-finite field value");
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

}  // namespace uclf_adapt::numkit
