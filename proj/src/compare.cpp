#include "drivesim/compare.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace drivesim {

namespace {

struct Column {
  const char* name;
  double TraceRecord::*field;
};

constexpr Column kColumns[] = {
    {"q", &TraceRecord::q},         {"e", &TraceRecord::e},
    {"r", &TraceRecord::r},         {"q_dot", &TraceRecord::q_dot},
    {"I", &TraceRecord::I},         {"I_d", &TraceRecord::I_d},
    {"eta_I", &TraceRecord::eta_I}, {"V_cmd", &TraceRecord::V_cmd},
    {"V_applied", &TraceRecord::V_applied},
};

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

ComparisonReport compare(const Trace& a, const Trace& b,
                         const std::string& name_a, const std::string& name_b,
                         std::uint64_t saturation_a, std::uint64_t saturation_b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("cannot compare empty traces");
  if (a.size() != b.size()) {
    throw std::invalid_argument("timing mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + " records");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].t != b[k].t) {
      throw std::invalid_argument("timing mismatch at record " + std::to_string(k));
    }
  }

  ComparisonReport rep;
  rep.name_a = name_a;
  rep.name_b = name_b;
  rep.saturation_a = saturation_a;
  rep.saturation_b = saturation_b;
  const double n = static_cast<double>(a.size());
  for (const Column& c : kColumns) {
    SignalDelta d;
    d.signal = c.name;
    double sd = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double va = a[k].*c.field;
      const double vb = b[k].*c.field;
      d.max_abs_delta = std::max(d.max_abs_delta, std::abs(vb - va));
      sd += (vb - va) * (vb - va);
      sa += va * va;
      sb += vb * vb;
    }
    d.rms_delta = std::sqrt(sd / n);
    d.rms_a = std::sqrt(sa / n);
    d.rms_b = std::sqrt(sb / n);
    if (d.rms_a > 0.0) d.rms_ratio = d.rms_b / d.rms_a;
    rep.signals.push_back(d);
  }

  const SummaryMetrics ma = summary_metrics(a);
  const SummaryMetrics mb = summary_metrics(b);
  rep.rms_e_final_a = ma.rms_e_final;
  rep.rms_e_final_b = mb.rms_e_final;
  if (ma.rms_e_final > 0.0) rep.rms_e_final_ratio = mb.rms_e_final / ma.rms_e_final;
  rep.parity = mb.rms_e_final <= kParityBound * ma.rms_e_final;
  return rep;
}

ComparisonReport compare(const RunResult& a, const RunResult& b) {
  return compare(a.trace, b.trace, a.scenario.name, b.scenario.name,
                 a.metrics.saturation_count, b.metrics.saturation_count);
}

std::string to_json(const ComparisonReport& rep) {
  nlohmann::ordered_json j;
  j["a"] = rep.name_a;
  j["b"] = rep.name_b;
  j["saturation_count"] = {{"a", rep.saturation_a}, {"b", rep.saturation_b}};
  j["rms_e_final"] = {{"a", rep.rms_e_final_a},
                      {"b", rep.rms_e_final_b},
                      {"ratio", optional_number(rep.rms_e_final_ratio)},
                      {"bound", kParityBound},
                      {"parity", rep.parity}};
  auto& signals = j["signals"] = nlohmann::ordered_json::array();
  for (const SignalDelta& d : rep.signals) {
    signals.push_back({{"signal", d.signal},
                       {"max_abs_delta", d.max_abs_delta},
                       {"rms_delta", d.rms_delta},
                       {"rms_a", d.rms_a},
                       {"rms_b", d.rms_b},
                       {"rms_ratio", optional_number(d.rms_ratio)}});
  }
  return j.dump(2) + "\n";
}

std::string to_text(const ComparisonReport& rep) {
  std::string out = "comparison: " + rep.name_a + " (a) vs " + rep.name_b + " (b)\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %14s %14s %14s %14s %10s\n", "signal",
                "max|b-a|", "rms(b-a)", "rms a", "rms b", "b/a");
  out += buf;
  for (const SignalDelta& d : rep.signals) {
    std::snprintf(buf, sizeof(buf), "%-10s %14.6e %14.6e %14.6e %14.6e ", d.signal.c_str(),
                  d.max_abs_delta, d.rms_delta, d.rms_a, d.rms_b);
    out += buf;
    if (d.rms_ratio) {
      std::snprintf(buf, sizeof(buf), "%10.4f\n", *d.rms_ratio);
      out += buf;
    } else {
      out += "         -\n";
    }
  }
  std::snprintf(buf, sizeof(buf), "saturation counts: a=%llu b=%llu\n",
                static_cast<unsigned long long>(rep.saturation_a),
                static_cast<unsigned long long>(rep.saturation_b));
  out += buf;
  std::snprintf(buf, sizeof(buf), "final-window rms e: a=%.6e b=%.6e", rep.rms_e_final_a,
                rep.rms_e_final_b);
  out += buf;
  if (rep.rms_e_final_ratio) {
    std::snprintf(buf, sizeof(buf), " ratio=%.4f (bound %.1f): %s\n", *rep.rms_e_final_ratio,
                  kParityBound, rep.parity ? "within" : "exceeded");
    out += buf;
  } else {
    out += rep.parity ? " (a is exact; b matches)\n" : " (a is exact; b is not)\n";
  }
  return out;
}

}  // namespace drivesim
