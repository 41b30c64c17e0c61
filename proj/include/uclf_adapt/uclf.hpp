#pragma once

// Families of unmatched control Lyapunov functions V(x, theta_hat) together
// with their dissipation rates Q and certainty-equivalence controllers.
//
// A family is a uclf for a plant when, for every theta in the parameter box,
//
//   dV/dt + dV/dx^T (f - Delta^T theta + B u(x, theta)) <= -Q(x, theta)
//
// with V and Q positive definite about the equilibrium x_d (the origin for
// every shipped family). verify_uclf() checks this on a sample grid.

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "uclf_adapt/plant.hpp"

namespace uclf_adapt::uclf {

using Vector = Eigen::VectorXd;

class UclfFamily {
 public:
  virtual ~UclfFamily() = default;

  virtual std::string id() const = 0;
  virtual int state_dim() const = 0;
  virtual int param_dim() const = 0;
  virtual int input_dim() const { return 1; }
  virtual Vector equilibrium() const { return Vector::Zero(state_dim()); }

  virtual double value(const Vector& x, const Vector& theta_hat,
                       double t) const = 0;
  virtual Vector grad_x(const Vector& x, const Vector& theta_hat,
                        double t) const = 0;
  virtual Vector grad_theta(const Vector& x, const Vector& theta_hat,
                            double t) const = 0;
  // Partial time derivative; zero for the time-invariant families.
  virtual double time_derivative(const Vector&, const Vector&, double) const {
    return 0.0;
  }
  virtual double dissipation(const Vector& x,
                             const Vector& theta_hat) const = 0;
  virtual Vector control(const Vector& x, const Vector& theta_hat,
                         double t) const = 0;
};

using FamilyPtr = std::shared_ptr<const UclfFamily>;

// Free-function forms of the family interface. These check dimensions.
double eval_V(const UclfFamily& family, const Vector& x,
              const Vector& theta_hat, double t);
Vector grad_x_V(const UclfFamily& family, const Vector& x,
                const Vector& theta_hat, double t);
Vector grad_theta_V(const UclfFamily& family, const Vector& x,
                    const Vector& theta_hat, double t);
double eval_Q(const UclfFamily& family, const Vector& x,
              const Vector& theta_hat);
Vector ce_control(const UclfFamily& family, const Vector& x,
                  const Vector& theta_hat, double t);

struct BacksteppingGains {
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 1.0;
  // Weight on x2^2 in the eq7 family; unused elsewhere.
  double x2_weight = 1.0;
};

// eq7 family:
//   alpha(x1) = th1 x1 - k1 x1 - k3 x1^3,   z = x3 - alpha(x1)
//   V = x1^2/2 + (beta/2) x2^2 + z^2/2
//   Q = k1 x1^2 + (k3 - (beta/2) th2max^2) x1^4 + (beta/2) x2^2 + k2 z^2
// where th2max bounds |th2| over the parameter box.
class Eq7Backstepping final : public UclfFamily {
 public:
  Eq7Backstepping(BacksteppingGains gains, double theta2_bound);

  std::string id() const override { return "eq7-backstep"; }
  int state_dim() const override { return 3; }
  int param_dim() const override { return 4; }

  double value(const Vector& x, const Vector& th, double t) const override;
  Vector grad_x(const Vector& x, const Vector& th, double t) const override;
  Vector grad_theta(const Vector& x, const Vector& th,
                    double t) const override;
  double dissipation(const Vector& x, const Vector& th) const override;
  Vector control(const Vector& x, const Vector& th, double t) const override;

  // Virtual control for x3 and its derivative in x1.
  double alpha(double x1, const Vector& th) const;
  double alpha_slope(double x1, const Vector& th) const;

  const BacksteppingGains& gains() const { return gains_; }
  double theta2_bound() const { return theta2_bound_; }

 private:
  BacksteppingGains gains_;
  double theta2_bound_;
};

// chain3 family: z1 = x1, z2 = x2 - a1(x1), z3 = x3 - a2(x1, x2),
// V = (z1^2 + z2^2 + z3^2)/2, Q = k1 z1^2 + k2 z2^2 + k3 z3^2.
class ChainBackstepping final : public UclfFamily {
 public:
  explicit ChainBackstepping(BacksteppingGains gains);

  std::string id() const override { return "chain3-backstep"; }
  int state_dim() const override { return 3; }
  int param_dim() const override { return 2; }

  double value(const Vector& x, const Vector& th, double t) const override;
  Vector grad_x(const Vector& x, const Vector& th, double t) const override;
  Vector grad_theta(const Vector& x, const Vector& th,
                    double t) const override;
  double dissipation(const Vector& x, const Vector& th) const override;
  Vector control(const Vector& x, const Vector& th, double t) const override;

  // Error coordinates (z1, z2, z3).
  Vector errors(const Vector& x, const Vector& th) const;

 private:
  BacksteppingGains gains_;
};

// min2 family: z1 = x1, z2 = x2 - (th1 - k1) x1, V = (z1^2 + z2^2)/2,
// Q = k1 z1^2 + k2 z2^2.
class MinimalBackstepping final : public UclfFamily {
 public:
  explicit MinimalBackstepping(BacksteppingGains gains);

  std::string id() const override { return "min2-backstep"; }
  int state_dim() const override { return 2; }
  int param_dim() const override { return 1; }

  double value(const Vector& x, const Vector& th, double t) const override;
  Vector grad_x(const Vector& x, const Vector& th, double t) const override;
  Vector grad_theta(const Vector& x, const Vector& th,
                    double t) const override;
  double dissipation(const Vector& x, const Vector& th) const override;
  Vector control(const Vector& x, const Vector& th, double t) const override;

 private:
  BacksteppingGains gains_;
};

const std::vector<std::string>& family_ids();

// Default gains per family (k1 = k2 = 1, beta = 1, and k3 = 5 for eq7).
BacksteppingGains default_gains(std::string_view id);

// theta_box is used by families whose dissipation budget depends on the
// parameter range (eq7 needs max |th2|).
FamilyPtr make_family(std::string_view id, const BacksteppingGains& gains,
                      const plant::ParamBox& theta_box);

// Model ids a family is designed for.
bool family_matches_model(std::string_view family_id,
                          std::string_view model_id);

struct CertifySpec {
  double half_width = 3.0;  // x in [-w, w]^n
  int state_points = 9;     // per axis
  int param_points = 5;     // per axis of the box
  double tolerance = 1e-9;
  std::size_t witnesses = 5;
};

struct CertSample {
  Vector x;
  Vector theta_hat;
  double margin = 0;       // -(Vdot at certainty equivalence) - Q
  double dissipation = 0;  // Q
  double energy = 0;       // V
};

struct CertificateReport {
  bool passed = false;
  std::size_t samples = 0;
  double min_margin = 0;
  // Smallest Q and V over samples away from x_d.
  double min_dissipation = 0;
  double min_energy = 0;
  // Worst samples, sorted by increasing margin (or Q when Q fails).
  std::vector<CertSample> worst;
  std::string failure;  // empty when passed
};

// Margin of the uclf inequality at one sample, with theta = theta_hat.
double certificate_margin(const UclfFamily& family,
                          const plant::SystemModel& model, const Vector& x,
                          const Vector& theta_hat, double t = 0.0);

// Grid certifier: passes iff every margin >= -tolerance and V, Q > 0 at
// every sample other than x_d.
CertificateReport verify_uclf(const UclfFamily& family,
                              const plant::SystemModel& model,
                              const plant::ParamBox& box,
                              const CertifySpec& spec = {});

}  // namespace uclf_adapt::uclf
