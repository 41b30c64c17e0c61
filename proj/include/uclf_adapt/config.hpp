#pragma once

// TOML run configuration. Every key is optional; missing keys fall back to
// the built-in preset of the selected model.
//
//   [model]       id
//   [uclf]        id, k1, k2, k3, beta
//   [adapt]       variant, gain_family, gamma_bar, tau, eta, lambda, beta,
//                 filter_pole, matched_gain, energy_offset, projection,
//                 matched, composite
//   [integrator]  method (rk4 | rk45), step, rel_tol, abs_tol, min_step,
//                 max_step, sample_interval
//   [scenario]    name, x0, theta_hat0, phi_hat0, theta_true, phi_true,
//                 theta_box, phi_box, horizon, settle_tol
//   [output]      format (csv | json), path, stride
//   [certify]     half_width, state_points, param_points, tolerance
//
// Per-parameter entries (gamma_bar, eta, lambda) accept a scalar, which is
// broadcast. Boxes are arrays of [lo, hi] pairs.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "uclf_adapt/simloop.hpp"
#include "uclf_adapt/uclf.hpp"

namespace uclf_adapt::cli {

struct OutputSpec {
  std::string format = "csv";
  std::string path = "out";
  // Write every stride-th sample. 0 picks the stride that matches the
  // sample interval for fixed-step runs.
  std::size_t stride = 0;
};

struct RunConfig {
  std::string source;  // file name, or "<string>"
  std::string uclf_id;
  uclf::BacksteppingGains gains;
  sim::Scenario scenario;
  uclf::CertifySpec certify;
  OutputSpec output;

  // Effective output stride for this scenario.
  std::size_t output_stride() const;
};

// Both throw ConfigError with "source:line:" prefixes where a line is known.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::string_view text,
                       const std::string& source = "<string>");

}  // namespace uclf_adapt::cli
