#pragma once

// Trace and summary files.
//
// CSV columns: t, x1..xn, u1..um, that1..thatp, gamma1..gammap, rho1..rhop,
// V, Q, Vc, s1..sp, w1..wp, then phihat1..phihatq for matched runs. Numbers
// are printed with 17 significant digits. The JSON trace holds the same
// columns and rows.

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "uclf_adapt/simloop.hpp"

namespace uclf_adapt::cli {

struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> trace_columns(const sim::Trace& trace, bool matched);

// Samples 0, stride, 2*stride, ... plus the final sample.
TraceTable tabulate(const sim::Trace& trace, bool matched,
                    std::size_t stride = 1);

void write_csv(std::ostream& out, const TraceTable& table);
void write_json(std::ostream& out, const TraceTable& table);

// Throw std::runtime_error on malformed input.
TraceTable read_csv(std::istream& in);
TraceTable read_json(std::istream& in);

nlohmann::json metrics_json(const sim::Metrics& metrics);

// %.17g; reads back to the same double.
std::string format_double(double v);

}  // namespace uclf_adapt::cli
