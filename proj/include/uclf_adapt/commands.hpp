#pragma once

// Command implementations behind the uclf_adapt executable. Each returns the
// process exit code and writes diagnostics to `err`.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uclf_adapt::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // I/O and other unexpected errors
  kExitInvalid = 2,     // configuration or usage error
  kExitDiverged = 3,    // integration diverged; partial trace written
  kExitCertFailed = 4,  // uclf certificate failed
};

struct RunOptions {
  std::string config;
  std::optional<std::string> out_dir;  // overrides [output] path
  std::optional<std::string> format;   // overrides [output] format
};

// Writes <out>/<name>.trace.{csv,json} and <out>/<name>.summary.json.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct CertifyOptions {
  std::string config;
  std::optional<int> samples;  // grid points per state axis
};

int cmd_certify(const CertifyOptions& opts, std::ostream& out,
                std::ostream& err);

struct CompareOptions {
  std::vector<std::string> configs;
  std::string out_dir = "out";
  // Worker count; 0 reads UCLF_ADAPT_THREADS, then the hardware count.
  unsigned threads = 0;
};

// Runs every config and writes <out>/compare.csv, one row per config in
// argument order, plus one summary file per run.
int cmd_compare(const CompareOptions& opts, std::ostream& out,
                std::ostream& err);

struct Lemma1Options {
  std::string gain = "exponential";
  double gamma_bar = 1.0;
  double tau = 1.0;
  double lambda = 1.0;
  std::string signal = "pulse:-0.9:5";
  // Default K = gamma_bar / 9, the value for eta - max_error^2 = 9.
  std::optional<double> k_gain;
  double horizon = 20.0;
  double step = 1e-3;
  std::string out_dir = "out";
};

// Writes <out>/lemma1.csv (t, w, rho) and <out>/lemma1.json.
int cmd_lemma1(const Lemma1Options& opts, std::ostream& out,
               std::ostream& err);

// Worker count used by cmd_compare when none is given.
unsigned default_thread_count();

}  // namespace uclf_adapt::cli
