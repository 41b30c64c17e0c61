#include "uclf_adapt/plant.hpp"

#include <cmath>

#include "uclf_adapt/errors.hpp"

namespace uclf_adapt::plant {

Matrix SystemModel::matched_regressor(const Vector&, double) const {
  throw DomainError("model '" + id() + "' has no matched parameters");
}

Vector eval_dynamics(const SystemModel& model, const Vector& x,
                     const Vector& u, const Vector& theta, const Vector& phi,
                     double t) {
  if (x.size() != model.state_dim())
    throw ContractViolation("eval_dynamics: state dimension mismatch");
  if (u.size() != model.input_dim())
    throw ContractViolation("eval_dynamics: input dimension mismatch");
  if (theta.size() != model.unmatched_dim())
    throw ContractViolation("eval_dynamics: theta dimension mismatch");
  if (phi.size() != model.matched_dim())
    throw ContractViolation("eval_dynamics: phi dimension mismatch");
  if (!theta.allFinite() || !phi.allFinite())
    throw ContractViolation("eval_dynamics: non-finite parameters");

  Vector effective_u = u;
  if (model.matched_dim() > 0) {
    effective_u -= model.matched_regressor(x, t).transpose() * phi;
  }
  return model.drift(x, t) -
         model.unmatched_regressor(x, t).transpose() * theta +
         model.input_matrix(x, t) * effective_u;
}

ParamBox::ParamBox(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size())
    throw ContractViolation("ParamBox: bound dimension mismatch");
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
      throw ContractViolation("ParamBox: bounds must be finite");
    if (lo_[i] > hi_[i])
      throw ContractViolation("ParamBox: lo must be <= hi in coordinate " +
                              std::to_string(i + 1));
  }
}

ParamBox ParamBox::from_intervals(
    const std::vector<std::pair<double, double>>& intervals) {
  Vector lo(static_cast<Eigen::Index>(intervals.size()));
  Vector hi(lo.size());
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    lo[static_cast<Eigen::Index>(i)] = intervals[i].first;
    hi[static_cast<Eigen::Index>(i)] = intervals[i].second;
  }
  return ParamBox(std::move(lo), std::move(hi));
}

bool ParamBox::contains(const Vector& v, double tol) const {
  if (v.size() != lo_.size()) return false;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= lo_[i] - tol && v[i] <= hi_[i] + tol)) return false;
  }
  return true;
}

Vector ParamBox::clamp(const Vector& v) const {
  if (v.size() != lo_.size())
    throw ContractViolation("ParamBox::clamp: dimension mismatch");
  return v.cwiseMax(lo_).cwiseMin(hi_);
}

// --- eq7 -----------------------------------------------------------------

Vector Eq7Model::drift(const Vector& x, double) const {
  return Vector{{x[2], -x[1], std::tanh(x[1])}};
}

Matrix Eq7Model::unmatched_regressor(const Vector& x, double) const {
  Matrix delta = Matrix::Zero(4, 3);
  delta(0, 0) = x[0];
  delta(1, 1) = x[0] * x[0];
  if (!split_) {
    delta(2, 2) = x[2];
    delta(3, 2) = x[0] * x[0];
  }
  return delta;
}

Matrix Eq7Model::input_matrix(const Vector&, double) const {
  return Matrix{{0.0}, {0.0}, {1.0}};
}

Matrix Eq7Model::matched_regressor(const Vector& x, double t) const {
  if (!split_) return SystemModel::matched_regressor(x, t);
  return Matrix{{x[2]}, {x[0] * x[0]}};
}

// --- chain3 --------------------------------------------------------------

Vector ChainModel::drift(const Vector& x, double) const {
  return Vector{{x[1], x[2], 0.0}};
}

Matrix ChainModel::unmatched_regressor(const Vector& x, double) const {
  Matrix delta = Matrix::Zero(2, 3);
  delta(0, 0) = x[0];
  delta(1, 1) = x[1];
  return delta;
}

Matrix ChainModel::input_matrix(const Vector&, double) const {
  return Matrix{{0.0}, {0.0}, {1.0}};
}

// --- min2 ----------------------------------------------------------------

Vector MinimalModel::drift(const Vector& x, double) const {
  return Vector{{x[1], 0.0}};
}

Matrix MinimalModel::unmatched_regressor(const Vector& x, double) const {
  return Matrix{{x[0], 0.0}};
}

Matrix MinimalModel::input_matrix(const Vector&, double) const {
  return Matrix{{0.0}, {1.0}};
}

// --- registry ------------------------------------------------------------

const std::vector<std::string>& model_ids() {
  static const std::vector<std::string> ids{"eq7", "eq7-split", "chain3",
                                            "min2"};
  return ids;
}

ModelPtr make_model(std::string_view id) {
  if (id == "eq7") return std::make_shared<Eq7Model>(false);
  if (id == "eq7-split") return std::make_shared<Eq7Model>(true);
  if (id == "chain3") return std::make_shared<ChainModel>();
  if (id == "min2") return std::make_shared<MinimalModel>();
  throw ConfigError("unknown model id '" + std::string(id) + "'");
}

ModelPreset make_preset(std::string_view id) {
  ModelPreset p;
  p.model = make_model(id);
  if (id == "eq7") {
    p.theta_box = ParamBox::from_intervals(
        {{-2.1, 1.5}, {-3.0, 1.5}, {-1.8, 2.25}, {-5.25, 1.5}});
    p.phi_box = ParamBox(Vector(0), Vector(0));
    p.truth = {Vector{{-1.8, -2.4, -0.75, -2.25}}, Vector(0)};
    p.x0 = Vector{{0.5, -0.5, 0.25}};
  } else if (id == "eq7-split") {
    p.theta_box = ParamBox::from_intervals(
        {{-2.1, 1.5}, {-3.0, 1.5}, {0.0, 0.0}, {0.0, 0.0}});
    p.phi_box = ParamBox::from_intervals({{-1.8, 2.25}, {-5.25, 1.5}});
    p.truth = {Vector{{-1.8, -2.4, 0.0, 0.0}}, Vector{{-0.75, -2.25}}};
    p.x0 = Vector{{0.5, -0.5, 0.25}};
  } else if (id == "chain3") {
    p.theta_box = ParamBox::from_intervals({{-2.0, 2.0}, {-2.0, 2.0}});
    p.phi_box = ParamBox(Vector(0), Vector(0));
    p.truth = {Vector{{-0.5, 0.5}}, Vector(0)};
    p.x0 = Vector{{0.3, 0.0, 0.0}};
  } else {
    p.theta_box = ParamBox::from_intervals({{-2.0, 2.0}});
    p.phi_box = ParamBox(Vector(0), Vector(0));
    p.truth = {Vector{{-1.5}}, Vector(0)};
    p.x0 = Vector{{0.5, 0.0}};
  }
  return p;
}

}  // namespace uclf_adapt::plant
