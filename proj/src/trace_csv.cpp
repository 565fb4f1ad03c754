#include "drivesim/trace_csv.hpp"

#include <cerrno>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace drivesim {

namespace {

void put(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::vector<double*> scalar_fields(TraceRecord& r) {
  return {&r.t,     &r.q,     &r.q_d,   &r.q_d_dot, &r.e,     &r.e_dot,
          &r.r,     &r.q_dot, &r.I,     &r.I_d,     &r.eta_I, &r.V_cmd,
          &r.V_applied};
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{
        "t_s",         "q_rad",          "q_d_rad",         "q_d_dot_rad_per_s",
        "e_rad",       "e_dot_rad_per_s", "r_rad_per_s",    "q_dot_rad_per_s",
        "I_amp",       "I_d_amp",        "eta_I_amp",       "V_cmd_volt",
        "V_applied_volt", "level",       "v_c1_volt",       "v_c2_volt"};
    for (int i = 0; i < 3; ++i) c.push_back("theta_tau_hat_" + std::to_string(i) + "_si");
    for (int i = 0; i < 6; ++i) c.push_back("theta_1_hat_" + std::to_string(i) + "_si");
    return c;
  }();
  return cols;
}

void write_csv(std::ostream& os, const Trace& trace) {
  if (trace.empty()) throw std::invalid_argument("cannot write an empty trace");
  std::string line;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    line += (i ? "," : "") + cols[i];
  }
  os << line << '\n';
  for (const TraceRecord& rec : trace) {
    TraceRecord r = rec;
    line.clear();
    for (double* f : scalar_fields(r)) {
      put(line, *f);
      line += ',';
    }
    line += std::to_string(r.level);
    line += ',';
    put(line, r.v_c1);
    line += ',';
    put(line, r.v_c2);
    for (double v : r.theta_tau_hat) {
      line += ',';
      put(line, v);
    }
    for (double v : r.theta_1_hat) {
      line += ',';
      put(line, v);
    }
    os << line << '\n';
  }
}

std::string to_csv(const Trace& trace) {
  std::ostringstream os;
  write_csv(os, trace);
  return os.str();
}

void emit_csv(const Trace& trace, const std::filesystem::path& path) {
  const std::string body = to_csv(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "cannot open " + path.string());
  }
  out << body;
  out.flush();
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "write failed for " + path.string());
  }
}

Trace parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw CsvError("missing header");
  const auto& cols = csv_columns();
  std::string expected;
  for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
  if (line != expected) throw CsvError("unexpected header: " + line);

  Trace trace;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> vals;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) {
        throw CsvError("line " + std::to_string(lineno) + ": bad number in column " +
                       std::to_string(vals.size() + 1));
      }
      vals.push_back(v);
      p = res.ptr;
      if (p == end) break;
      if (*p != ',') {
        throw CsvError("line " + std::to_string(lineno) + ": expected ','");
      }
      ++p;
    }
    if (vals.size() != cols.size()) {
      throw CsvError("line " + std::to_string(lineno) + ": expected " +
                     std::to_string(cols.size()) + " columns, got " +
                     std::to_string(vals.size()));
    }
    TraceRecord r;
    std::size_t i = 0;
    for (double* f : scalar_fields(r)) *f = vals[i++];
    r.level = static_cast<int>(vals[i++]);
    r.v_c1 = vals[i++];
    r.v_c2 = vals[i++];
    for (double& v : r.theta_tau_hat) v = vals[i++];
    for (double& v : r.theta_1_hat) v = vals[i++];
    trace.push_back(r);
  }
  return trace;
}

Trace parse_csv(const std::string& text) {
  std::istringstream is(text);
  return parse_csv(is);
}

}  // namespace drivesim
