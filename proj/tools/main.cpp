#include <CLI11.hpp>

#include <iostream>

#include "uclf_adapt/commands.hpp"

using namespace uclf_adapt::cli;

int main(int argc, char** argv) {
  CLI::App app{"Adaptive control with per-parameter dynamic adaptation gains"};
  app.require_subcommand(1);

  RunOptions run;
  std::string run_out, run_format;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write its trace");
  run_cmd->add_option("--config", run.config, "TOML scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_out, "Output directory (overrides [output] path)");
  run_cmd->add_option("--format", run_format, "Trace format")->check(CLI::IsMember({"csv", "json"}));

  CertifyOptions cert;
  int samples = 0;
  auto* cert_cmd = app.add_subcommand("certify", "Check the uclf inequality on a sample grid");
  cert_cmd->add_option("--config", cert.config, "TOML scenario file")->required()->check(CLI::ExistingFile);
  cert_cmd->add_option("--samples", samples, "Grid points per state axis")->check(CLI::PositiveNumber);

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several configs that differ only in [adapt]");
  cmp_cmd->add_option("--configs", cmp.configs, "TOML scenario files")->required()->expected(2, -1)->check(CLI::ExistingFile);
  cmp_cmd->add_option("--out", cmp.out_dir, "Output directory")->capture_default_str();
  cmp_cmd->add_option("--threads", cmp.threads, "Worker count (default: UCLF_ADAPT_THREADS or hardware)");

  Lemma1Options lem;
  double k_gain = -1;
  auto* lem_cmd = app.add_subcommand("lemma1", "Drive the leakage filter with a synthetic signal");
  lem_cmd->add_option("--gain", lem.gain, "Gain family (exponential | rational)")->capture_default_str();
  lem_cmd->add_option("--gamma-bar", lem.gamma_bar, "Nominal gain")->capture_default_str();
  lem_cmd->add_option("--tau", lem.tau, "Exponential time constant")->capture_default_str();
  lem_cmd->add_option("--lambda", lem.lambda, "Leakage rate")->capture_default_str();
  lem_cmd->add_option("--signal", lem.signal, "zero | pulse:AMP:DUR | decay:AMP:RATE | sine:AMP:FREQ")->capture_default_str();
  lem_cmd->add_option("--K", k_gain, "Input gain (default gamma_bar / 9)");
  lem_cmd->add_option("--horizon", lem.horizon, "Final time")->capture_default_str();
  lem_cmd->add_option("--step", lem.step, "RK4 step")->capture_default_str();
  lem_cmd->add_option("--out", lem.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (*run_cmd) {
    if (!run_out.empty()) run.out_dir = run_out;
    if (!run_format.empty()) run.format = run_format;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*cert_cmd) {
    if (cert_cmd->count("--samples")) cert.samples = samples;
    return cmd_certify(cert, std::cout, std::cerr);
  }
  if (*cmp_cmd) return cmd_compare(cmp, std::cout, std::cerr);
  if (lem_cmd->count("--K")) lem.k_gain = k_gain;
  return cmd_lemma1(lem, std::cout, std::cerr);
}
