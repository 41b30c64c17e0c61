#pragma once

// Explicit ODE integration and finite-difference kernels.
//
// Everything here is a pure function over caller-owned data. The closed-loop
// runner integrates its augmented state (plant, estimates, gain arguments,
// filters) through these entry points.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace uclf_adapt::numkit {

using Vector = Eigen::VectorXd;

using Rhs = std::function<Vector(double t, const Vector& x)>;

// Invoked after every accepted step; may modify the state in place
// (re-clamping onto a constraint set, for example).
using PostStep = std::function<void(double t, Vector& x)>;

using ScalarField = std::function<double(const Vector& x)>;

struct FixedStep {
  double step = 1e-3;
};

struct AdaptiveStep {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double min_step = 1e-10;
  double max_step = 1e-1;
};

struct IntegratorSpec {
  std::variant<FixedStep, AdaptiveStep> method = FixedStep{};
  double horizon = 1.0;

  bool is_fixed() const { return std::holds_alternative<FixedStep>(method); }

  // Throws ContractViolation naming the first violated invariant.
  void validate() const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
};

struct AdaptiveStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct AdaptiveResult {
  Trajectory samples;
  AdaptiveStats stats;
};

// Raised when the right-hand side or the state stops being finite.
class IntegrationDiverged : public std::runtime_error {
 public:
  IntegrationDiverged(const std::string& what, double last_time,
                      Trajectory partial)
      : std::runtime_error(what),
        last_time_(last_time),
        partial_(std::move(partial)) {}

  double last_valid_time() const noexcept { return last_time_; }
  const Trajectory& partial() const noexcept { return partial_; }
  Trajectory take_partial() { return std::move(partial_); }

 private:
  double last_time_;
  Trajectory partial_;
};

// Raised when the adaptive controller needs a step below min_step.
class StepUnderflow : public IntegrationDiverged {
 public:
  using IntegrationDiverged::IntegrationDiverged;
};

// Classic RK4 on the grid t0 + k*step, k = 0..round(horizon/step).
Trajectory integrate_fixed(const Rhs& rhs, double t0, const Vector& x0,
                           const IntegratorSpec& spec,
                           const PostStep& post_step = {});

// Dormand-Prince 5(4) with proportional step-size control. The solution is
// reported on `output_grid` (ascending, inside [t0, t0 + horizon]) by cubic
// Hermite interpolation between accepted steps. An empty grid reports every
// accepted step instead.
AdaptiveResult integrate_adaptive(const Rhs& rhs, double t0, const Vector& x0,
                                  const IntegratorSpec& spec,
                                  std::span<const double> output_grid = {},
                                  const PostStep& post_step = {});

// Uniform grid t0, t0 + dt, ..., t0 + horizon (endpoint included).
std::vector<double> uniform_grid(double t0, double horizon, double dt);

// Central differences, one coordinate at a time.
Vector finite_diff_gradient(const ScalarField& field, const Vector& point,
                            double h);

}  // namespace uclf_adapt::numkit
