#include "drivesim/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace drivesim {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Reads fields in schema order, falling back to defaults and recording where
// every value came from.
class FieldReader {
 public:
  explicit FieldReader(const ConfigDocument& doc) : doc_(doc) {}

  std::string text(const std::string& key, const std::string& fallback,
                   Provenance prov) {
    known_.insert(key);
    if (auto it = doc_.entries.find(key); it != doc_.entries.end()) {
      notes_.push_back({key, it->second.value, Provenance::file});
      return it->second.value;
    }
    notes_.push_back({key, fallback, prov});
    return fallback;
  }

  double number(const std::string& key, double fallback, Provenance prov) {
    const std::string raw = text(key, format(fallback), prov);
    return parse_number(key, raw);
  }

  template <std::size_t N>
  std::array<double, N> vector(const std::string& key,
                               const std::array<double, N>& fallback,
                               Provenance prov) {
    std::string joined;
    for (std::size_t i = 0; i < N; ++i) {
      joined += (i ? ", " : "") + format(fallback[i]);
    }
    const std::string raw = text(key, joined, prov);
    std::vector<double> values;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(parse_number(key, trim(item)));
    std::array<double, N> out{};
    if (values.size() == 1) {
      out.fill(values[0]);
    } else if (values.size() == N) {
      std::copy(values.begin(), values.end(), out.begin());
    } else {
      fail(key, "expected 1 or " + std::to_string(N) + " comma-separated values");
    }
    return out;
  }

  bool flag(const std::string& key, bool fallback, Provenance prov) {
    const std::string raw = text(key, fallback ? "true" : "false", prov);
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    fail(key, "expected true or false, got '" + raw + "'");
  }


  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::string where = doc_.origin;
    if (auto it = doc_.entries.find(key); it != doc_.entries.end()) {
      where += ":" + std::to_string(it->second.line);
    }
    throw ConfigError(where + ": field '" + key + "': " + msg);
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : doc_.entries) {
      if (!known_.count(key)) {
        throw ConfigError(doc_.origin + ":" + std::to_string(entry.line) +
                          ": unknown field '" + key + "'");
      }
    }
  }

  std::vector<FieldNote> take_notes() { return std::move(notes_); }

  static std::string format(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }

 private:
  double parse_number(const std::string& key, const std::string& raw) const {
    double v = 0.0;
    const char* end = raw.data() + raw.size();
    auto res = std::from_chars(raw.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || raw.empty()) {
      fail(key, "expected a number, got '" + raw + "'");
    }
    return v;
  }

  const ConfigDocument& doc_;
  std::set<std::string> known_;
  std::vector<FieldNote> notes_;
};

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::file: return "file";
    case Provenance::published: return "published";
    case Provenance::invented: return "invented";
  }
  return "?";
}

ConfigDocument parse_config(const std::string& text, const std::string& origin) {
  ConfigDocument doc;
  doc.origin = origin;
  std::stringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        throw ConfigError(origin + ":" + std::to_string(line) +
                          ": malformed section header '" + s + "'");
      }
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line) +
                        ": expected 'key = value', got '" + s + "'");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line) +
                        ": field outside of a [section]");
    }
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) {
      value = trim(std::string_view(value).substr(0, hash));
    }
    const std::string key = section + "." + trim(std::string_view(s).substr(0, eq));
    if (doc.entries.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(line) +
                        ": duplicate field '" + key + "'");
    }
    doc.entries[key] = {value, line};
  }
  return doc;
}

void override_field(ConfigDocument& doc, const std::string& key,
                    const std::string& value) {
  doc.entries[key] = {value, 0};
}

LoadedScenario build_scenario(const ConfigDocument& doc) {
  const std::vector<std::string> required{"scenario.mode", "scenario.t_end_s"};
  std::vector<std::string> missing;
  for (const auto& key : required) {
    if (!doc.entries.count(key)) missing.push_back(key);
  }
  if (!missing.empty()) {
    std::string msg = doc.origin + ": missing required field(s):";
    for (const auto& key : missing) msg += " " + key;
    throw ConfigError(msg);
  }

  constexpr auto published = Provenance::published;
  constexpr auto invented = Provenance::invented;
  FieldReader rd(doc);
  Scenario scn;

  const std::string stem = std::filesystem::path(doc.origin).stem().string();
  scn.name = rd.text("scenario.name", stem.empty() ? "unnamed" : stem, invented);
  const std::string mode_text = rd.text("scenario.mode", "", invented);
  const auto mode = parse_mode(mode_text);
  if (!mode) rd.fail("scenario.mode", "expected ideal, inverter or hbridge");
  scn.mode = *mode;
  scn.t_end = rd.number("scenario.t_end_s", 10.0, invented);
  scn.dt_plant = rd.number("scenario.dt_plant_s",
                           scn.mode == Mode::ideal ? 1e-5 : 2e-6, invented);
  scn.dt_ctrl = rd.number("scenario.dt_ctrl_s", 1e-4, invented);
  scn.thd_fundamental_hz =
      rd.number("scenario.thd_fundamental_hz", scn.thd_fundamental_hz, published);

  PlantParams& p = scn.plant;
  p.R = rd.number("motor_dynamics.R_ohm", 5.0, published);
  p.L = rd.number("motor_dynamics.L_henry", 25e-3, published);
  p.K_B = rd.number("motor_dynamics.K_B_volt_s_per_rad", 0.9, published);
  const double K_tau =
      rd.number("motor_dynamics.K_tau_newton_m_per_amp", kDefaultTorqueConstant, published);
  const double J = rd.number("motor_dynamics.J_kg_m2", kDefaultRotorInertia, invented);
  const double B_0 =
      rd.number("motor_dynamics.B0_newton_m_s_per_rad", kDefaultRawFriction, invented);
  p.link.l = rd.number("motor_dynamics.link_length_m", 0.305, published);
  p.link.r_o = rd.number("motor_dynamics.load_radius_m", 0.023, published);
  p.link.m_0 = rd.number("motor_dynamics.link_mass_kg", 0.434, published);
  p.link.m_1 = rd.number("motor_dynamics.load_mass_kg", 0.506, published);
  p.link.G = rd.number("motor_dynamics.G_m_per_s2", 9.81, published);
  LumpedParams lumped{};
  try {
    lumped = derive_lumped_params(p.link, K_tau, J, B_0);
  } catch (const ParameterError& err) {
    throw ConfigError(doc.origin + ": " + err.what());
  }
  p.M = rd.number("motor_dynamics.M_amp_s2_per_rad", lumped.M, invented);
  p.B = rd.number("motor_dynamics.B_amp_s_per_rad", lumped.B, invented);
  p.N = rd.number("motor_dynamics.N_amp", lumped.N, published);
  scn.initial.q = rd.number("motor_dynamics.q0_rad", 0.0, invented);
  scn.initial.q_dot = rd.number("motor_dynamics.q_dot0_rad_per_s", 0.0, invented);
  scn.initial.I = rd.number("motor_dynamics.I0_amp", 0.0, invented);

  Gains& g = scn.gains;
  g.alpha = rd.number("backstepping_controller.alpha_per_s", 35.0, published);
  g.K_s = rd.number("backstepping_controller.K_s_amp_s_per_rad", 10.0, published);
  g.K_e = rd.number("backstepping_controller.K_e_ohm", 1.0, published);
  g.gamma_tau = rd.vector("backstepping_controller.gamma_tau_diag_si",
                          Vec3{0.01, 5.0, 5.0}, published);
  g.gamma_e = rd.vector("backstepping_controller.gamma_e_diag_si", 
                        Vec6{0.01, 0.01, 0.01, 0.01, 0.01, 0.01}, published);
  scn.theta_tau_hat0 =
      rd.vector("backstepping_controller.theta_tau_hat0_si", Vec3{}, invented);
  scn.theta_1_hat0 =
      rd.vector("backstepping_controller.theta_1_hat0_si", Vec6{}, invented);
  const std::string variant =
      rd.text("backstepping_controller.w1_variant", "consistent", invented);
  if (variant == "consistent") {
    g.w1_variant = W1Variant::consistent;
  } else if (variant == "as_printed") {
    g.w1_variant = W1Variant::as_printed;
  } else {
    rd.fail("backstepping_controller.w1_variant", "expected consistent or as_printed");
  }

  PwmConfig pwm;
  pwm.V_dc = rd.number("inverter_pwm.V_dc_volt", 100.0, invented);
  pwm.f_c = rd.number("inverter_pwm.f_c_hz", 5000.0, invented);
  pwm.table4_verbatim = rd.flag("inverter_pwm.table4_verbatim", false, invented);
  pwm.n_levels = scn.mode == Mode::hbridge ? 3 : 5;
  const std::string cap_mode = rd.text("inverter_pwm.capacitor_mode", "stiff", invented);
  if (cap_mode == "stiff") {
    scn.capacitor_mode = CapacitorMode::stiff;
  } else if (cap_mode == "dynamic") {
    scn.capacitor_mode = CapacitorMode::dynamic;
  } else {
    rd.fail("inverter_pwm.capacitor_mode", "expected stiff or dynamic");
  }
  scn.capacitance = rd.number("inverter_pwm.C_farad", 4.7e-3, invented);
  scn.tau_src = rd.number("inverter_pwm.tau_src_s", 10e-3, invented);
  if (scn.mode != Mode::ideal) scn.pwm = pwm;

  rd.reject_unknown();
  try {
    validate(scn);
  } catch (const ParameterError& err) {
    throw ConfigError(doc.origin + ": invariant violated: " + err.what());
  }
  return {scn, rd.take_notes()};
}

LoadedScenario load_scenario_text(const std::string& text,
                                  const std::string& origin) {
  return build_scenario(parse_config(text, origin));
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str(), path.string());
}

}  // namespace drivesim
