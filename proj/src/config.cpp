#include "uclf_adapt/config.hpp"

#include <toml.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "uclf_adapt/errors.hpp"

namespace uclf_adapt::cli {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"id"}},
      {"uclf", {"id", "k1", "k2", "k3", "beta"}},
      {"adapt",
       {"variant", "gain_family", "gamma_bar", "tau", "eta", "lambda", "beta",
        "filter_pole", "matched_gain", "energy_offset", "projection",
        "matched", "composite"}},
      {"integrator",
       {"method", "step", "rel_tol", "abs_tol", "min_step", "max_step",
        "sample_interval"}},
      {"scenario",
       {"name", "x0", "theta_hat0", "phi_hat0", "theta_true", "phi_true",
        "theta_box", "phi_box", "horizon", "settle_tol"}},
      {"output", {"format", "path", "stride"}},
      {"certify", {"half_width", "state_points", "param_points", "tolerance"}},
  };
  return s;
}

int line_of(const toml::node& n) {
  return static_cast<int>(n.source().begin.line);
}

class Reader {
 public:
  Reader(const toml::table& root, std::string source)
      : root_(root), source_(std::move(source)) {
    for (auto&& [key, node] : root_) {
      const std::string name(key.str());
      const auto it = schema().find(name);
      if (it == schema().end()) fail("unknown table [" + name + "]", node);
      const auto* tbl = node.as_table();
      if (!tbl) fail("'" + name + "' must be a table", node);
      for (auto&& [k, v] : *tbl) {
        const std::string kn(k.str());
        if (!it->second.count(kn))
          fail("unknown key '" + kn + "' in [" + name + "]", v);
        lines_[name + "." + kn] = line_of(v);
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg, const toml::node& at) const {
    throw ConfigError(msg, source_, line_of(at));
  }

  int line(const std::string& dotted) const {
    const auto it = lines_.find(dotted);
    return it == lines_.end() ? 0 : it->second;
  }
  const std::string& source() const { return source_; }

  const toml::node* get(const std::string& table, const std::string& key) const {
    const auto* tbl = root_[table].as_table();
    return tbl ? tbl->get(key) : nullptr;
  }

  std::optional<double> number(const std::string& table,
                               const std::string& key) const {
    const auto* n = get(table, key);
    if (!n) return std::nullopt;
    return as_number(*n, table + "." + key);
  }

  std::optional<long long> integer(const std::string& table,
                                   const std::string& key) const {
    const auto* n = get(table, key);
    if (!n) return std::nullopt;
    auto v = n->value<int64_t>();
    if (!n->is_integer() || !v)
      fail(table + "." + key + ": expected an integer", *n);
    return *v;
  }

  std::optional<bool> boolean(const std::string& table,
                              const std::string& key) const {
    const auto* n = get(table, key);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) fail(table + "." + key + ": expected true or false", *n);
    return *n->value<bool>();
  }

  std::optional<std::string> string(const std::string& table,
                                    const std::string& key) const {
    const auto* n = get(table, key);
    if (!n) return std::nullopt;
    if (!n->is_string()) fail(table + "." + key + ": expected a string", *n);
    return *n->value<std::string>();
  }

  // Scalar (broadcast to `dim`) or array of `dim` numbers.
  std::optional<Vector> vector(const std::string& table, const std::string& key,
                               int dim, bool allow_scalar) const {
    const auto* n = get(table, key);
    if (!n) return std::nullopt;
    const std::string name = table + "." + key;
    if (n->is_number()) {
      if (!allow_scalar) fail(name + ": expected an array", *n);
      return Vector::Constant(dim, as_number(*n, name));
    }
    const auto* arr = n->as_array();
    if (!arr) fail(name + ": expected a number or an array", *n);
    if (static_cast<int>(arr->size()) != dim)
      fail(name + ": expected " + std::to_string(dim) + " entries, got " +
               std::to_string(arr->size()),
           *n);
    Vector v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = as_number((*arr)[static_cast<std::size_t>(i)], name);
    return v;
  }

  std::optional<plant::ParamBox> box(const std::string& table,
                                     const std::string& key, int dim) const {
    const auto* n = get(table, key);
    if (!n) return std::nullopt;
    const std::string name = table + "." + key;
    const auto* arr = n->as_array();
    if (!arr || static_cast<int>(arr->size()) != dim)
      fail(name + ": expected " + std::to_string(dim) + " [lo, hi] pairs", *n);
    Vector lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      const auto& item = (*arr)[static_cast<std::size_t>(i)];
      const auto* pair = item.as_array();
      if (!pair || pair->size() != 2) fail(name + ": expected [lo, hi]", item);
      lo[i] = as_number((*pair)[0], name);
      hi[i] = as_number((*pair)[1], name);
      if (!(lo[i] <= hi[i])) fail(name + ": interval needs lo <= hi", item);
    }
    return plant::ParamBox(lo, hi);
  }

  // Scalar (times identity), diagonal array, or array of rows.
  std::optional<Matrix> matrix(const std::string& table, const std::string& key,
                               int dim) const {
    const auto* n = get(table, key);
    if (!n) return std::nullopt;
    const std::string name = table + "." + key;
    if (n->is_number()) return as_number(*n, name) * Matrix::Identity(dim, dim);
    const auto* arr = n->as_array();
    if (!arr || static_cast<int>(arr->size()) != dim)
      fail(name + ": expected a scalar, " + std::to_string(dim) +
               " diagonal entries, or " + std::to_string(dim) + " rows",
           *n);
    if (arr->empty() || (*arr)[0].is_number()) {
      Vector d(dim);
      for (int i = 0; i < dim; ++i)
        d[i] = as_number((*arr)[static_cast<std::size_t>(i)], name);
      return Matrix(d.asDiagonal());
    }
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const auto& row_node = (*arr)[static_cast<std::size_t>(i)];
      const auto* row = row_node.as_array();
      if (!row || static_cast<int>(row->size()) != dim)
        fail(name + ": each row needs " + std::to_string(dim) + " entries",
             row_node);
      for (int j = 0; j < dim; ++j)
        m(i, j) = as_number((*row)[static_cast<std::size_t>(j)], name);
    }
    return m;
  }

 private:
  double as_number(const toml::node& n, const std::string& name) const {
    const auto v = n.value<double>();
    if (!n.is_number() || !v) fail(name + ": expected a number", n);
    if (!std::isfinite(*v)) fail(name + ": must be finite", n);
    return *v;
  }

  const toml::table& root_;
  std::string source_;
  std::map<std::string, int> lines_;
};

std::string default_family(const std::string& model_id) {
  return model_id == "eq7-split" ? "eq7-backstep" : model_id + "-backstep";
}

// Leading "table.key" of a validation message, if any.
std::string message_key(const std::string& msg) {
  const auto end = msg.find_first_of(":[ =");
  return msg.substr(0, end);
}

RunConfig build(const Reader& r) {
  RunConfig cfg;
  cfg.source = r.source();
  auto& sc = cfg.scenario;

  const std::string model_id = r.string("model", "id").value_or("eq7");
  try {
    sc = sim::default_scenario(model_id);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), r.source(), r.line("model.id"));
  }
  const int n = sc.model->state_dim();
  const int p = sc.model->unmatched_dim();
  const int q = sc.model->matched_dim();

  // Scenario geometry first: the adaptation defaults depend on the boxes.
  if (auto b = r.box("scenario", "theta_box", p)) {
    sc.theta_box = *b;
    sc.theta_hat0 = sc.theta_box.clamp(Vector::Zero(p));
  }
  if (auto b = r.box("scenario", "phi_box", q)) {
    sc.phi_box = *b;
    sc.phi_hat0 = sc.phi_box.clamp(Vector::Zero(q));
  }
  if (auto name = r.string("scenario", "name")) {
    sc.name = *name;
  } else if (r.source() != "<string>") {
    sc.name = std::filesystem::path(r.source()).stem().string();
  }
  if (auto v = r.vector("scenario", "x0", n, false)) sc.x0 = *v;
  if (auto v = r.vector("scenario", "theta_hat0", p, false)) sc.theta_hat0 = *v;
  if (auto v = r.vector("scenario", "phi_hat0", q, false)) sc.phi_hat0 = *v;
  if (auto v = r.vector("scenario", "theta_true", p, false)) sc.truth.theta = *v;
  if (auto v = r.vector("scenario", "phi_true", q, false)) sc.truth.phi = *v;
  if (auto v = r.number("scenario", "horizon")) sc.integrator.horizon = *v;
  if (auto v = r.number("scenario", "settle_tol")) sc.settle_tol = *v;

  // uclf family.
  cfg.uclf_id = r.string("uclf", "id").value_or(default_family(model_id));
  try {
    cfg.gains = uclf::default_gains(cfg.uclf_id);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), r.source(), r.line("uclf.id"));
  }
  if (auto v = r.number("uclf", "k1")) cfg.gains.k1 = *v;
  if (auto v = r.number("uclf", "k2")) cfg.gains.k2 = *v;
  if (auto v = r.number("uclf", "k3")) cfg.gains.k3 = *v;
  if (auto v = r.number("uclf", "beta")) cfg.gains.x2_weight = *v;
  for (const auto& [key, value] :
       {std::pair{"k1", cfg.gains.k1}, std::pair{"k2", cfg.gains.k2},
        std::pair{"k3", cfg.gains.k3}, std::pair{"beta", cfg.gains.x2_weight}}) {
    if (!(value > 0))
      throw ConfigError(std::string("uclf.") + key + ": must be > 0",
                        r.source(), r.line(std::string("uclf.") + key));
  }
  try {
    sc.family = uclf::make_family(cfg.uclf_id, cfg.gains, sc.theta_box);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), r.source(), r.line("uclf.id"));
  }

  // Adaptation.
  auto& ad = sc.adapt;
  ad = adapt::AdaptConfig::defaults(sc.theta_box, q);
  try {
    if (auto v = r.string("adapt", "variant"))
      ad.variant = adapt::parse_law_variant(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), r.source(), r.line("adapt.variant"));
  }
  try {
    if (auto v = r.string("adapt", "gain_family"))
      ad.family = adapt::parse_gain_family(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), r.source(), r.line("adapt.gain_family"));
  }
  if (auto v = r.vector("adapt", "gamma_bar", p, true)) ad.nominal = *v;
  if (auto v = r.number("adapt", "tau")) ad.tau = *v;
  if (auto v = r.vector("adapt", "eta", p, true)) ad.eta = *v;
  if (auto v = r.vector("adapt", "lambda", p, true)) ad.leak_rate = *v;
  if (auto v = r.number("adapt", "beta")) ad.composite_weight = *v;
  if (auto v = r.number("adapt", "filter_pole")) ad.filter_pole = *v;
  if (auto v = r.number("adapt", "energy_offset")) ad.energy_offset = *v;
  if (auto v = r.boolean("adapt", "projection")) ad.projection = *v;
  if (auto v = r.boolean("adapt", "matched")) ad.matched = *v;
  if (auto v = r.boolean("adapt", "composite")) ad.composite = *v;
  if (q > 0) {
    if (auto m = r.matrix("adapt", "matched_gain", q)) ad.matched_gain = *m;
  } else if (const auto* node = r.get("adapt", "matched_gain")) {
    r.fail("adapt.matched_gain: model has no matched parameters", *node);
  }

  // Integrator.
  const std::string method = r.string("integrator", "method").value_or("rk4");
  if (method == "rk4") {
    numkit::FixedStep fs;
    if (auto v = r.number("integrator", "step")) fs.step = *v;
    sc.integrator.method = fs;
    for (const char* key : {"rel_tol", "abs_tol", "min_step", "max_step"}) {
      if (const auto* node = r.get("integrator", key))
        r.fail(std::string("integrator.") + key + ": only used with rk45",
               *node);
    }
  } else if (method == "rk45") {
    numkit::AdaptiveStep as;
    if (auto v = r.number("integrator", "rel_tol")) as.rel_tol = *v;
    if (auto v = r.number("integrator", "abs_tol")) as.abs_tol = *v;
    if (auto v = r.number("integrator", "min_step")) as.min_step = *v;
    if (auto v = r.number("integrator", "max_step")) as.max_step = *v;
    if (const auto* node = r.get("integrator", "step"))
      r.fail("integrator.step: only used with rk4", *node);
    sc.integrator.method = as;
  } else {
    throw ConfigError("integrator.method: expected 'rk4' or 'rk45', got '" +
                          method + "'",
                      r.source(), r.line("integrator.method"));
  }
  if (auto v = r.number("integrator", "sample_interval"))
    sc.sample_interval = *v;

  // Output.
  if (auto v = r.string("output", "format")) cfg.output.format = *v;
  if (cfg.output.format != "csv" && cfg.output.format != "json")
    throw ConfigError("output.format: expected 'csv' or 'json'", r.source(),
                      r.line("output.format"));
  if (auto v = r.string("output", "path")) cfg.output.path = *v;
  if (auto v = r.integer("output", "stride")) {
    if (*v < 0)
      throw ConfigError("output.stride: must be >= 0", r.source(),
                        r.line("output.stride"));
    cfg.output.stride = static_cast<std::size_t>(*v);
  }

  // Certifier region.
  auto& cs = cfg.certify;
  if (auto v = r.number("certify", "half_width")) cs.half_width = *v;
  if (auto v = r.integer("certify", "state_points"))
    cs.state_points = static_cast<int>(*v);
  if (auto v = r.integer("certify", "param_points"))
    cs.param_points = static_cast<int>(*v);
  if (auto v = r.number("certify", "tolerance")) cs.tolerance = *v;
  if (!(cs.half_width > 0))
    throw ConfigError("certify.half_width: must be > 0", r.source(),
                      r.line("certify.half_width"));
  if (cs.state_points < 1 || cs.param_points < 1)
    throw ConfigError("certify: grid sizes must be >= 1", r.source(),
                      r.line("certify.state_points"));
  if (!(cs.tolerance >= 0))
    throw ConfigError("certify.tolerance: must be >= 0", r.source(),
                      r.line("certify.tolerance"));

  try {
    sc.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), r.source(), r.line(message_key(e.what())));
  }
  return cfg;
}

}  // namespace

std::size_t RunConfig::output_stride() const {
  if (output.stride > 0) return output.stride;
  if (const auto* fs = std::get_if<numkit::FixedStep>(&scenario.integrator.method)) {
    const double ratio = scenario.sample_interval / fs->step;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ratio)));
  }
  return 1;
}

RunConfig parse_config(std::string_view text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(e.description()), source,
                      static_cast<int>(e.source().begin.line));
  }
  return build(Reader(root, source));
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace uclf_adapt::cli
