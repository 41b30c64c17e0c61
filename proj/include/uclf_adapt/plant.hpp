#pragma once

// Uncertain control-affine plants
//
//   xdot = f(x,t) - Delta(x,t)^T theta + B(x,t) (u - Psi(x,t)^T phi)
//
// with unmatched parameters theta (p of them, regressor Delta in R^{p x n})
// and optional matched parameters phi (q of them, regressor Psi in R^{q x m}).

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace uclf_adapt::plant {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual std::string id() const = 0;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual int unmatched_dim() const = 0;
  virtual int matched_dim() const { return 0; }

  virtual Vector drift(const Vector& x, double t) const = 0;
  // p x n
  virtual Matrix unmatched_regressor(const Vector& x, double t) const = 0;
  // n x m
  virtual Matrix input_matrix(const Vector& x, double t) const = 0;
  // q x m. Throws DomainError for models without matched parameters.
  virtual Matrix matched_regressor(const Vector& x, double t) const;
};

using ModelPtr = std::shared_ptr<const SystemModel>;

// f - Delta^T theta + B (u - Psi^T phi); the Psi term is skipped when q = 0.
Vector eval_dynamics(const SystemModel& model, const Vector& x,
                     const Vector& u, const Vector& theta, const Vector& phi,
                     double t);

// Per-coordinate interval set. Nonempty and bounded by construction.
class ParamBox {
 public:
  ParamBox() = default;
  ParamBox(Vector lo, Vector hi);

  static ParamBox from_intervals(
      const std::vector<std::pair<double, double>>& intervals);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

  bool contains(const Vector& v, double tol = 0.0) const;
  Vector clamp(const Vector& v) const;
  // Worst-case |estimate - truth| when both lie in the box: the widths.
  Vector max_error() const { return hi_ - lo_; }
  Vector center() const { return 0.5 * (lo_ + hi_); }

 private:
  Vector lo_;
  Vector hi_;
};

struct TrueParams {
  Vector theta;
  Vector phi;
};

// Built-in plants.
//
//   eq7        xdot1 = x3 - th1 x1
//              xdot2 = -x2 - th2 x1^2
//              xdot3 = tanh(x2) - th3 x3 - th4 x1^2 + u
//   eq7-split  same plant; th3, th4 moved to matched parameters phi
//              (Delta rows 3-4 are zero, Psi = [x3; x1^2])
//   chain3     xdot1 = x2 - th1 x1, xdot2 = x3 - th2 x2, xdot3 = u
//   min2       xdot1 = x2 - th1 x1, xdot2 = u
class Eq7Model final : public SystemModel {
 public:
  explicit Eq7Model(bool matched_split = false) : split_(matched_split) {}

  std::string id() const override { return split_ ? "eq7-split" : "eq7"; }
  int state_dim() const override { return 3; }
  int input_dim() const override { return 1; }
  int unmatched_dim() const override { return 4; }
  int matched_dim() const override { return split_ ? 2 : 0; }

  Vector drift(const Vector& x, double t) const override;
  Matrix unmatched_regressor(const Vector& x, double t) const override;
  Matrix input_matrix(const Vector& x, double t) const override;
  Matrix matched_regressor(const Vector& x, double t) const override;

  bool matched_split() const { return split_; }

 private:
  bool split_;
};

class ChainModel final : public SystemModel {
 public:
  std::string id() const override { return "chain3"; }
  int state_dim() const override { return 3; }
  int input_dim() const override { return 1; }
  int unmatched_dim() const override { return 2; }

  Vector drift(const Vector& x, double t) const override;
  Matrix unmatched_regressor(const Vector& x, double t) const override;
  Matrix input_matrix(const Vector& x, double t) const override;
};

class MinimalModel final : public SystemModel {
 public:
  std::string id() const override { return "min2"; }
  int state_dim() const override { return 2; }
  int input_dim() const override { return 1; }
  int unmatched_dim() const override { return 1; }

  Vector drift(const Vector& x, double t) const override;
  Matrix unmatched_regressor(const Vector& x, double t) const override;
  Matrix input_matrix(const Vector& x, double t) const override;
};

// Default parameter sets shipped with each built-in plant.
struct ModelPreset {
  ModelPtr model;
  ParamBox theta_box;
  ParamBox phi_box;  // dim 0 when the model has no matched parameters
  TrueParams truth;
  Vector x0;
};

const std::vector<std::string>& model_ids();

// Throws ConfigError for unknown ids.
ModelPtr make_model(std::string_view id);
ModelPreset make_preset(std::string_view id);

}  // namespace uclf_adapt::plant
