#include "uclf_adapt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "uclf_adapt/config.hpp"
#include "uclf_adapt/errors.hpp"
#include "uclf_adapt/trace_io.hpp"

namespace uclf_adapt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  std::string status;  // ok | diverged | error
  std::string message;
  std::optional<sim::RunResult> result;
  std::optional<sim::MonitorReport> monitor;
  std::optional<sim::GainAuditReport> audit;
};

Outcome execute(const RunConfig& cfg) {
  Outcome o;
  const auto& sc = cfg.scenario;
  try {
    o.result = sim::run_scenario(sc);
    o.status = "ok";
  } catch (const sim::ScenarioDiverged& e) {
    o.status = "diverged";
    o.message = e.what();
    o.result = e.partial();
  } catch (const std::exception& e) {
    o.status = "error";
    o.message = e.what();
    return o;
  }
  if (!o.result->trace.empty()) {
    o.monitor = sim::lyapunov_monitor(o.result->trace, sc);
    o.audit = sim::audit_gain_rates(o.result->trace, sc);
  }
  return o;
}

json summary_json(const RunConfig& cfg, const Outcome& o) {
  const auto& sc = cfg.scenario;
  json j;
  j["scenario"] = sc.name;
  j["model"] = sc.model->id();
  j["uclf"] = cfg.uclf_id;
  j["variant"] = std::string(adapt::to_string(sc.adapt.variant));
  j["gain_family"] = std::string(adapt::to_string(sc.adapt.family));
  j["status"] = o.status;
  if (!o.message.empty()) j["message"] = o.message;
  if (o.result && !o.result->trace.empty()) {
    j["samples"] = o.result->trace.size();
    j["final_time"] = o.result->trace.t.back();
    j["metrics"] = metrics_json(o.result->metrics);
  }
  if (o.monitor) {
    j["lyapunov_monitor"] = {{"monotone", o.monitor->monotone},
                             {"max_increase", o.monitor->max_increase},
                             {"max_excess", o.monitor->max_excess}};
  }
  if (o.audit) {
    j["gain_rate_audit"] = {{"passed", o.audit->passed},
                            {"max_violation", o.audit->max_violation},
                            {"checked", o.audit->checked}};
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_trace(const fs::path& path, const RunConfig& cfg,
                 const sim::Trace& trace, const std::string& format) {
  const auto table =
      tabulate(trace, cfg.scenario.adapt.matched, cfg.output_stride());
  std::ostringstream os;
  if (format == "json") {
    write_json(os, table);
  } else {
    write_csv(os, table);
  }
  write_text(path, os.str());
}

std::string describe(const Outcome& o) {
  std::ostringstream os;
  os << o.status;
  if (o.result && !o.result->trace.empty()) {
    const auto& m = o.result->metrics;
    os << " final |x| = " << format_double(m.final_state_norm);
    os << ", gain reduction =";
    for (double r : m.gain_reduction) os << ' ' << format_double(r);
  }
  return os.str();
}

// First field in which two scenarios disagree outside [adapt], or empty.
std::string scenario_mismatch(const RunConfig& a, const RunConfig& b) {
  const auto& x = a.scenario;
  const auto& y = b.scenario;
  auto same = [](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return u.size() == v.size() && u == v;
  };
  if (x.model->id() != y.model->id()) return "model";
  if (a.uclf_id != b.uclf_id) return "uclf";
  if (!same(x.x0, y.x0)) return "x0";
  if (!same(x.theta_hat0, y.theta_hat0)) return "theta_hat0";
  if (!same(x.phi_hat0, y.phi_hat0)) return "phi_hat0";
  if (!same(x.truth.theta, y.truth.theta)) return "theta_true";
  if (!same(x.truth.phi, y.truth.phi)) return "phi_true";
  if (!same(x.theta_box.lo(), y.theta_box.lo()) ||
      !same(x.theta_box.hi(), y.theta_box.hi()))
    return "theta_box";
  if (!same(x.phi_box.lo(), y.phi_box.lo()) ||
      !same(x.phi_box.hi(), y.phi_box.hi()))
    return "phi_box";
  if (x.integrator.horizon != y.integrator.horizon) return "horizon";
  return {};
}

}  // namespace

unsigned default_thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UCLF_ADAPT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0)
      n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  const std::string format = opts.format.value_or(cfg.output.format);
  if (format != "csv" && format != "json") {
    err << "error: --format must be csv or json\n";
    return kExitInvalid;
  }
  const fs::path dir = opts.out_dir.value_or(cfg.output.path);
  const auto outcome = execute(cfg);
  if (outcome.status == "error") {
    err << "error: " << outcome.message << '\n';
    return kExitFailure;
  }
  try {
    fs::create_directories(dir);
    const std::string stem = cfg.scenario.name;
    if (outcome.result && !outcome.result->trace.empty())
      write_trace(dir / (stem + ".trace." + format), cfg,
                  outcome.result->trace, format);
    write_text(dir / (stem + ".summary.json"),
               summary_json(cfg, outcome).dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  out << cfg.scenario.name << ": " << describe(outcome) << '\n';
  if (outcome.status == "diverged") {
    err << "diverged: " << outcome.message << '\n';
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_certify(const CertifyOptions& opts, std::ostream& out,
                std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opts.config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  auto spec = cfg.certify;
  if (opts.samples) {
    if (*opts.samples < 1) {
      err << "error: --samples must be >= 1\n";
      return kExitInvalid;
    }
    spec.state_points = *opts.samples;
  }
  const auto& sc = cfg.scenario;
  const auto rep = uclf::verify_uclf(*sc.family, *sc.model, sc.theta_box, spec);
  out << "uclf " << cfg.uclf_id << " on model " << sc.model->id() << ": "
      << rep.samples << " samples over x in [-" << spec.half_width << ", "
      << spec.half_width << "]^" << sc.model->state_dim() << '\n';
  out << "min margin " << format_double(rep.min_margin) << ", min Q "
      << format_double(rep.min_dissipation) << ", min V "
      << format_double(rep.min_energy) << '\n';
  for (const auto& w : rep.worst) {
    out << "  witness x = [";
    for (Eigen::Index i = 0; i < w.x.size(); ++i)
      out << (i ? ", " : "") << format_double(w.x[i]);
    out << "] theta_hat = [";
    for (Eigen::Index i = 0; i < w.theta_hat.size(); ++i)
      out << (i ? ", " : "") << format_double(w.theta_hat[i]);
    out << "] margin " << format_double(w.margin) << " Q "
        << format_double(w.dissipation) << '\n';
  }
  if (!rep.passed) {
    out << "FAIL: " << rep.failure << '\n';
    return kExitCertFailed;
  }
  out << "PASS\n";
  return kExitOk;
}

int cmd_compare(const CompareOptions& opts, std::ostream& out,
                std::ostream& err) {
  if (opts.configs.size() < 2) {
    err << "error: compare needs at least two configs\n";
    return kExitInvalid;
  }
  std::vector<RunConfig> cfgs;
  try {
    for (const auto& path : opts.configs) cfgs.push_back(load_config(path));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  for (std::size_t k = 1; k < cfgs.size(); ++k) {
    const auto field = scenario_mismatch(cfgs[0], cfgs[k]);
    if (!field.empty()) {
      err << "error: " << opts.configs[k] << " differs from "
          << opts.configs[0] << " in " << field
          << "; compared configs may differ only in [adapt]\n";
      return kExitInvalid;
    }
  }

  const std::size_t N = cfgs.size();
  std::vector<Outcome> outcomes(N);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < N;) outcomes[k] = execute(cfgs[k]);
  };
  const unsigned threads = std::min<std::size_t>(
      N, opts.threads > 0 ? opts.threads : default_thread_count());
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const int p = cfgs[0].scenario.model->unmatched_dim();
  std::ostringstream csv;
  csv << "config,scenario,variant,status,converged,final_state_norm,"
         "max_state_norm,settling_time,max_vc_increase,vc_monotone,"
         "gain_audit";
  for (int i = 1; i <= p; ++i) csv << ",reduction" << i;
  for (int i = 1; i <= p; ++i) csv << ",final_gain_error" << i;
  csv << '\n';
  bool failed = false;
  try {
    fs::create_directories(opts.out_dir);
    for (std::size_t k = 0; k < N; ++k) {
      const auto& o = outcomes[k];
      const auto& sc = cfgs[k].scenario;
      if (o.status == "error") {
        failed = true;
        err << "error: " << opts.configs[k] << ": " << o.message << '\n';
      }
      csv << opts.configs[k] << ',' << sc.name << ','
          << adapt::to_string(sc.adapt.variant) << ',' << o.status;
      const bool have = o.result && !o.result->trace.empty();
      if (have) {
        const auto& m = o.result->metrics;
        csv << ',' << (m.converged && o.status == "ok" ? 1 : 0) << ','
            << format_double(m.final_state_norm) << ','
            << format_double(m.max_state_norm) << ','
            << (m.settling_time ? format_double(*m.settling_time) : "") << ','
            << format_double(m.max_vc_increase) << ','
            << (o.monitor && o.monitor->monotone ? 1 : 0) << ','
            << (o.audit && o.audit->passed ? 1 : 0);
        for (double r : m.gain_reduction) csv << ',' << format_double(r);
        for (double e : m.final_gain_error) csv << ',' << format_double(e);
      } else {
        csv << ",0,,,,,0,0";
        for (int i = 0; i < 2 * p; ++i) csv << ',';
      }
      csv << '\n';
      write_text(fs::path(opts.out_dir) /
                     (std::to_string(k + 1) + "_" + sc.name + ".summary.json"),
                 summary_json(cfgs[k], o).dump(2) + "\n");
      out << opts.configs[k] << ": " << describe(o) << '\n';
    }
    write_text(fs::path(opts.out_dir) / "compare.csv", csv.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return failed ? kExitFailure : kExitOk;
}

int cmd_lemma1(const Lemma1Options& opts, std::ostream& out,
               std::ostream& err) {
  sim::Lemma1Report rep;
  try {
    const auto family = adapt::parse_gain_family(opts.gain);
    if (!(opts.gamma_bar > 0)) throw ConfigError("--gamma-bar must be > 0");
    if (!(opts.tau > 0)) throw ConfigError("--tau must be > 0");
    if (!(opts.horizon > 0) || !(opts.step > 0) || opts.step > opts.horizon)
      throw ConfigError("--horizon and --step must satisfy 0 < step <= horizon");
    const adapt::GainFunction g(family, opts.gamma_bar, opts.tau);
    const auto signal = sim::SignalSpec::parse(opts.signal);
    const double k_gain = opts.k_gain.value_or(opts.gamma_bar / 9.0);
    rep = sim::lemma1_harness(g, opts.lambda, k_gain, signal, opts.horizon,
                              opts.step);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  try {
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "t,w,rho\n";
    for (std::size_t k = 0; k < rep.t.size(); ++k)
      csv << format_double(rep.t[k]) << ',' << format_double(rep.w[k]) << ','
          << format_double(rep.rho[k]) << '\n';
    write_text(dir / "lemma1.csv", csv.str());
    json j = {{"signal", opts.signal},
              {"lambda", opts.lambda},
              {"sup_abs_rho", rep.sup_abs_rho},
              {"final_abs_rho", rep.final_abs_rho},
              {"rho_at_window_end", rep.rho_at_window_end},
              {"predicted_offset", rep.predicted_offset},
              {"bounded", rep.bounded},
              {"recovers", rep.recovers}};
    write_text(dir / "lemma1.json", j.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  out << "sup|rho| " << format_double(rep.sup_abs_rho) << ", |rho(T)| "
      << format_double(rep.final_abs_rho) << ", bounded "
      << (rep.bounded ? "yes" : "no") << ", recovers "
      << (rep.recovers ? "yes" : "no") << '\n';
  return kExitOk;
}

}  // namespace uclf_adapt::cli
