#include "uclf_adapt/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace uclf_adapt::cli {

namespace {

void indexed(std::vector<std::string>& cols, const char* stem, int count) {
  for (int i = 1; i <= count; ++i) cols.push_back(stem + std::to_string(i));
}

void append(std::vector<double>& row, const Eigen::VectorXd& v) {
  row.insert(row.end(), v.data(), v.data() + v.size());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trace_columns(const sim::Trace& tr, bool matched) {
  std::vector<std::string> cols{"t"};
  indexed(cols, "x", tr.n);
  indexed(cols, "u", tr.m);
  indexed(cols, "that", tr.p);
  indexed(cols, "gamma", tr.p);
  indexed(cols, "rho", tr.p);
  cols.insert(cols.end(), {"V", "Q", "Vc"});
  indexed(cols, "s", tr.p);
  indexed(cols, "w", tr.p);
  if (matched) indexed(cols, "phihat", tr.q);
  return cols;
}

TraceTable tabulate(const sim::Trace& tr, bool matched, std::size_t stride) {
  if (stride == 0) stride = 1;
  TraceTable table;
  table.columns = trace_columns(tr, matched);
  const std::size_t N = tr.size();
  for (std::size_t k = 0; k < N; ++k) {
    if (k % stride != 0 && k + 1 != N) continue;
    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(tr.t[k]);
    append(row, tr.x[k]);
    append(row, tr.u[k]);
    append(row, tr.theta_hat[k]);
    append(row, tr.gamma[k]);
    append(row, tr.rho[k]);
    row.push_back(tr.V[k]);
    row.push_back(tr.Q[k]);
    row.push_back(tr.Vc[k]);
    append(row, tr.s[k]);
    append(row, tr.w[k]);
    if (matched) append(row, tr.phi_hat[k]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(std::ostream& out, const TraceTable& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    out << (j ? "," : "") << table.columns[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j)
      out << (j ? "," : "") << format_double(row[j]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const TraceTable& table) {
  nlohmann::json doc;
  doc["columns"] = table.columns;
  auto& rows = doc["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::json::array();
    for (double v : row) {
      if (std::isfinite(v)) {
        r.push_back(v);
      } else {
        r.push_back(nullptr);
      }
    }
    rows.push_back(std::move(r));
  }
  out << doc.dump() << '\n';
}

TraceTable read_csv(std::istream& in) {
  TraceTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace csv: empty");
  table.columns = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.columns.size())
      throw std::runtime_error("trace csv: line " + std::to_string(lineno) +
                               " has " + std::to_string(cells.size()) +
                               " cells");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0')
        throw std::runtime_error("trace csv: line " + std::to_string(lineno) +
                                 ": bad number '" + c + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TraceTable read_json(std::istream& in) {
  const auto doc = nlohmann::json::parse(in);
  TraceTable table;
  table.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const auto& r : doc.at("rows")) {
    if (r.size() != table.columns.size())
      throw std::runtime_error("trace json: row width mismatch");
    std::vector<double> row;
    row.reserve(r.size());
    for (const auto& v : r)
      row.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                : v.get<double>());
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::json metrics_json(const sim::Metrics& m) {
  nlohmann::json j;
  if (m.settling_time) {
    j["settling_time"] = *m.settling_time;
  } else {
    j["settling_time"] = nullptr;
  }
  j["final_state_norm"] = m.final_state_norm;
  j["max_state_norm"] = m.max_state_norm;
  j["gain_reduction"] = m.gain_reduction;
  j["final_gain_error"] = m.final_gain_error;
  j["max_vc_increase"] = m.max_vc_increase;
  j["converged"] = m.converged;
  return j;
}

}  // namespace uclf_adapt::cli
