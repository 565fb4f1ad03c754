// Command-line front end: run, compare, sweep and validate scenarios.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "drivesim/compare.hpp"
#include "drivesim/plots.hpp"
#include "drivesim/run_output.hpp"
#include "drivesim/scenario_io.hpp"
#include "drivesim/trace_csv.hpp"

namespace fs = std::filesystem;
using namespace drivesim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  std::string name;
  Trace trace;
  std::uint64_t saturation = 0;
  bool diverged = false;
};

// A .csv argument is read as a recorded trace; anything else is a scenario
// file that gets simulated.
Loaded load_or_run(const fs::path& path) {
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    return {path.stem().string(), parse_csv(in), 0, false};
  }
  const LoadedScenario loaded = load_scenario(path);
  RunResult res = run(loaded.scenario);
  return {res.scenario.name, std::move(res.trace), res.metrics.saturation_count,
          res.divergence.has_value()};
}

int cmd_run(const fs::path& scenario, const fs::path& out, const OutputOptions& opts) {
  const LoadedScenario loaded = load_scenario(scenario);
  const RunResult result = run(loaded.scenario);
  const fs::path dir = out / loaded.scenario.name;
  write_run_outputs(loaded, result, dir, opts);
  std::cout << summary_text(loaded, result) << "outputs in " << dir.string() << "\n";
  return result.divergence ? kExitDiverged : kExitOk;
}

int cmd_validate(const fs::path& scenario) {
  const LoadedScenario loaded = load_scenario(scenario);
  std::cout << "scenario " << loaded.scenario.name << " is valid\n";
  for (const FieldNote& f : loaded.fields) {
    std::cout << "  " << f.key << " = " << f.value << "  [" << to_string(f.provenance)
              << "]\n";
  }
  return kExitOk;
}

int cmd_compare(const fs::path& a, const fs::path& b, const fs::path& out, bool plots) {
  const Loaded la = load_or_run(a);
  const Loaded lb = load_or_run(b);
  ComparisonReport rep;
  try {
    rep = compare(la.trace, lb.trace, la.name, lb.name, la.saturation, lb.saturation);
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  fs::create_directories(out);
  std::ofstream(out / "comparison.json", std::ios::binary) << to_json(rep);
  std::ofstream(out / "comparison.txt", std::ios::binary) << to_text(rep);
  if (plots) write_svg(error_overlay_figure(la.trace, lb.trace, la.name, lb.name), out);
  std::cout << to_text(rep);
  return la.diverged || lb.diverged ? kExitDiverged : kExitOk;
}

// "section.key=v1,v2,..." -> key and values.
std::pair<std::string, std::vector<std::string>> split_param(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw UsageError("--param expects section.key=v1,v2,... got '" + spec + "'");
  }
  std::vector<std::string> values;
  std::stringstream ss(spec.substr(eq + 1));
  std::string v;
  while (std::getline(ss, v, ',')) {
    if (!v.empty()) values.push_back(v);
  }
  if (values.empty()) throw UsageError("--param '" + spec + "' lists no values");
  return {spec.substr(0, eq), values};
}

int cmd_sweep(const fs::path& scenario, const std::string& param, const fs::path& out,
              const OutputOptions& opts) {
  const auto [key, values] = split_param(param);
  std::ifstream in(scenario);
  if (!in) throw ConfigError(scenario.string() + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  const ConfigDocument base = parse_config(buf.str(), scenario.string());

  // Build every variant first so config errors surface before any run starts.
  std::vector<LoadedScenario> variants;
  for (const std::string& v : values) {
    ConfigDocument doc = base;
    override_field(doc, key, v);
    LoadedScenario loaded = build_scenario(doc);
    loaded.scenario.name += "__" + key + "=" + v;
    variants.push_back(std::move(loaded));
  }

  std::vector<std::future<RunResult>> jobs;
  for (const LoadedScenario& l : variants) {
    jobs.push_back(std::async(std::launch::async, [&l] { return run(l.scenario); }));
  }
  int code = kExitOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const RunResult result = jobs[i].get();
    const fs::path dir = out / variants[i].scenario.name;
    write_run_outputs(variants[i], result, dir, opts);
    const SummaryMetrics& m = result.metrics;
    std::cout << key << "=" << values[i] << ": max|e|=" << m.max_abs_e
              << " rms_e_final=" << m.rms_e_final << " max|eta_I|=" << m.max_abs_eta
              << " rms_eta_I_final=" << m.rms_eta_final
              << (result.divergence ? " DIVERGED" : "") << "  -> " << dir.string() << "\n";
    if (result.divergence) code = kExitDiverged;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop DC motor drive simulator"};
  app.require_subcommand(1);

  std::string out = "out";
  bool no_plots = false;
  std::string format = "csv";
  const auto add_output_flags = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_flag("--no-plots", no_plots, "Skip SVG figures");
    sub->add_option("--format", format, "Trace format")
        ->check(CLI::IsMember({"csv"}))
        ->capture_default_str();
  };

  std::string scenario;
  std::string other;
  std::string param;

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  run_cmd->add_option("scenario", scenario, "Scenario file")->required();
  add_output_flags(run_cmd);

  auto* cmp_cmd = app.add_subcommand("compare", "Compare two scenarios or trace CSVs");
  cmp_cmd->add_option("a", scenario, "Baseline scenario or trace.csv")->required();
  cmp_cmd->add_option("b", other, "Second scenario or trace.csv")->required();
  add_output_flags(cmp_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over a list of values");
  sweep_cmd->add_option("scenario", scenario, "Scenario file")->required();
  sweep_cmd->add_option("--param", param, "section.key=v1,v2,...")->required();
  add_output_flags(sweep_cmd);

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", scenario, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  const OutputOptions opts{true, !no_plots};
  try {
    if (*run_cmd) return cmd_run(scenario, out, opts);
    if (*cmp_cmd) return cmd_compare(scenario, other, out, opts.plots);
    if (*sweep_cmd) return cmd_sweep(scenario, param, out, opts);
    if (*validate_cmd) return cmd_validate(scenario);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
