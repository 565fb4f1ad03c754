#include "drivesim/run_output.hpp"

#include <cerrno>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "drivesim/plots.hpp"
#include "drivesim/trace_csv.hpp"

namespace drivesim {

namespace {

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "cannot open " + path.string());
  }
  out << body;
  if (!out.flush()) {
    throw std::system_error(errno, std::generic_category(),
                            "write failed for " + path.string());
  }
}

}  // namespace

std::string summary_json(const LoadedScenario& loaded, const RunResult& result) {
  nlohmann::ordered_json j;
  j["scenario"] = result.scenario.name;
  j["mode"] = std::string(to_string(result.scenario.mode));
  auto& fields = j["fields"] = nlohmann::ordered_json::array();
  for (const FieldNote& f : loaded.fields) {
    fields.push_back({{"key", f.key},
                      {"value", f.value},
                      {"source", std::string(to_string(f.provenance))}});
  }
  const SummaryMetrics& m = result.metrics;
  j["metrics"] = {{"records", result.trace.size()},
                  {"max_abs_e_rad", m.max_abs_e},
                  {"t_max_abs_e_s", m.t_max_abs_e},
                  {"rms_e_final_rad", m.rms_e_final},
                  {"max_abs_eta_I_amp", m.max_abs_eta},
                  {"t_max_abs_eta_I_s", m.t_max_abs_eta},
                  {"rms_eta_I_final_amp", m.rms_eta_final},
                  {"thd_v_applied", m.thd_v_applied ? nlohmann::ordered_json(*m.thd_v_applied)
                                                    : nlohmann::ordered_json(nullptr)},
                  {"saturation_count", m.saturation_count}};
  if (result.scenario.mode == Mode::inverter) {
    nlohmann::ordered_json entries;
    nlohmann::ordered_json samples;
    for (std::size_t i = 0; i < kInverterStateCount; ++i) {
      const std::string row(to_string(static_cast<InverterState>(i)));
      entries[row] = result.state_entries[i];
      samples[row] = result.state_samples[i];
    }
    j["switching_rows"] = {{"entries", entries}, {"plant_samples", samples}};
  }
  if (result.divergence) {
    j["divergence"] = {{"field", result.divergence->field},
                       {"message", result.divergence->message},
                       {"t_s", result.divergence->t}};
  } else {
    j["divergence"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string summary_text(const LoadedScenario& loaded, const RunResult& result) {
  std::string out = "scenario " + result.scenario.name + " (" +
                    std::string(to_string(result.scenario.mode)) + ")\n";
  for (const FieldNote& f : loaded.fields) {
    out += "  " + f.key + " = " + f.value + "  [" +
           std::string(to_string(f.provenance)) + "]\n";
  }
  const SummaryMetrics& m = result.metrics;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "max|e| = %.6e rad at t = %.4f s, final rms e = %.6e rad\n"
                "max|eta_I| = %.6e A at t = %.4f s, final rms eta_I = %.6e A\n",
                m.max_abs_e, m.t_max_abs_e, m.rms_e_final, m.max_abs_eta,
                m.t_max_abs_eta, m.rms_eta_final);
  out += buf;
  if (m.thd_v_applied) {
    std::snprintf(buf, sizeof(buf), "THD(V_applied) = %.4f\n", *m.thd_v_applied);
    out += buf;
  }
  out += "saturated samples: " + std::to_string(m.saturation_count) + "\n";
  if (result.divergence) {
    std::snprintf(buf, sizeof(buf), "DIVERGED at t = %.6f s in %s: ", result.divergence->t,
                  result.divergence->field.c_str());
    out += buf + result.divergence->message + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_run_outputs(
    const LoadedScenario& loaded, const RunResult& result,
    const std::filesystem::path& dir, const OutputOptions& opts) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  if (opts.csv && !result.trace.empty()) {
    emit_csv(result.trace, dir / "trace.csv");
    written.push_back(dir / "trace.csv");
  }
  write_text(dir / "summary.json", summary_json(loaded, result));
  written.push_back(dir / "summary.json");
  if (opts.plots && !result.trace.empty()) {
    for (auto& p : emit_plots(result.trace, dir)) written.push_back(p);
    if (result.scenario.pwm) {
      const PwmWaveform wave = pwm_demo_waveform(*result.scenario.pwm);
      const std::string title = result.scenario.mode == Mode::hbridge
                                    ? "Three-level H-bridge output, 60 Hz reference"
                                    : "Five-level output, 60 Hz reference";
      written.push_back(write_svg(pwm_figure(wave, title), dir));
    }
  }
  return written;
}

}  // namespace drivesim
