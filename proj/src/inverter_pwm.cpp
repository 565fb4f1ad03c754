#include "drivesim/inverter_pwm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "drivesim/motor_dynamics.hpp"

namespace drivesim {

namespace {

// Columns S1, S2, S5, S6 of the switching table, in InverterState order.
constexpr std::array<std::array<bool, 4>, kInverterStateCount> kTable{{
    {false, false, true, true},   // 0
    {false, true, true, true},    // 1a
    {false, false, false, true},  // 1b
    {false, true, false, true},   // 2
    {false, true, false, false},  // 3a
    {true, true, false, true},    // 3b
    {true, true, false, false},   // 4
}};

enum class Node { positive, midpoint, negative };

// A leg with its upper pair (S_hi, S_lo) connects its output to a bus node.
Node leg_node(bool upper, bool inner) {
  if (upper && inner) return Node::positive;
  if (!upper && inner) return Node::midpoint;
  if (!upper && !inner) return Node::negative;
  throw std::logic_error("leg with outer switch on and inner switch off");
}

double node_potential(Node n, const CapacitorBank& caps) {
  // Potentials relative to the negative rail.
  switch (n) {
    case Node::positive: return caps.v_c1 + caps.v_c2;
    case Node::midpoint: return caps.v_c2;
    case Node::negative: return 0.0;
  }
  return 0.0;
}

}  // namespace

void validate(const PwmConfig& cfg) {
  if (!(std::isfinite(cfg.V_dc) && cfg.V_dc > 0.0)) {
    throw ParameterError("pwm violates V_dc > 0");
  }
  if (!(std::isfinite(cfg.f_c) && cfg.f_c > 0.0)) {
    throw ParameterError("pwm violates f_c > 0");
  }
  if (cfg.n_levels < 2) throw ParameterError("pwm violates n_levels >= 2");
}

std::string_view to_string(InverterState s) {
  switch (s) {
    case InverterState::k0: return "0";
    case InverterState::k1a: return "1a";
    case InverterState::k1b: return "1b";
    case InverterState::k2: return "2";
    case InverterState::k3a: return "3a";
    case InverterState::k3b: return "3b";
    case InverterState::k4: return "4";
  }
  return "?";
}

std::array<bool, 8> gates_of(InverterState s) {
  const auto& row = kTable[static_cast<std::size_t>(s)];
  return {row[0], row[1], !row[0], !row[1], row[2], row[3], !row[2], !row[3]};
}

InverterState classify(const SwitchState& s) {
  const auto& g = s.gates;
  if (g[0] == g[2] || g[1] == g[3] || g[4] == g[6] || g[5] == g[7]) {
    throw std::logic_error("gate pattern breaks a complementary pair");
  }
  const std::array<bool, 4> key{g[0], g[1], g[4], g[5]};
  for (std::size_t i = 0; i < kTable.size(); ++i) {
    if (kTable[i] == key) return static_cast<InverterState>(i);
  }
  throw std::logic_error("gate pattern matches no switching-table row");
}

CapacitorBank balanced_bank(double V_dc, CapacitorMode mode, double C,
                            double tau_src) {
  CapacitorBank caps;
  caps.v_c1 = V_dc / 2.0;
  caps.v_c2 = V_dc / 2.0;
  caps.C = C;
  caps.tau_src = tau_src;
  caps.mode = mode;
  return caps;
}

std::vector<double> carriers_at(double t, const PwmConfig& cfg) {
  const int n_carriers = cfg.n_levels - 1;
  const double phase = t * cfg.f_c - std::floor(t * cfg.f_c);
  const double unit = phase < 0.5 ? 2.0 * phase : 2.0 - 2.0 * phase;
  const double width = 2.0 / n_carriers;
  std::vector<double> out(static_cast<std::size_t>(n_carriers));
  for (int k = 0; k < n_carriers; ++k) {
    out[static_cast<std::size_t>(k)] = -1.0 + width * (k + unit);
  }
  return out;
}

int pwm_level(double reference, const std::vector<double>& carriers,
              bool table4_verbatim) {
  const double u = std::clamp(reference, -1.0, 1.0);
  int level = 0;
  for (double c : carriers) {
    if (table4_verbatim ? (c > u) : (u >= c)) ++level;
  }
  return level;
}

SwitchState select_switch_state(int level, const SwitchState& prev) {
  SwitchState next = prev;
  InverterState row;
  switch (level) {
    case 0: row = InverterState::k0; break;
    case 1:
      row = prev.balance_toggle_half_neg ? InverterState::k1b : InverterState::k1a;
      next.balance_toggle_half_neg = !prev.balance_toggle_half_neg;
      break;
    case 2: row = InverterState::k2; break;
    case 3:
      row = prev.balance_toggle_half_pos ? InverterState::k3b : InverterState::k3a;
      next.balance_toggle_half_pos = !prev.balance_toggle_half_pos;
      break;
    case 4: row = InverterState::k4; break;
    default:
      throw std::out_of_range("inverter level " + std::to_string(level) +
                              " outside 0..4");
  }
  next.gates = gates_of(row);
  return next;
}

double inverter_output(const SwitchState& s, const CapacitorBank& caps,
                       const PwmConfig& cfg) {
  const InverterState row = classify(s);
  if (caps.mode == CapacitorMode::stiff) {
    const double half = cfg.V_dc / 2.0;
    switch (row) {
      case InverterState::k0: return -cfg.V_dc;
      case InverterState::k1a:
      case InverterState::k1b: return -half;
      case InverterState::k2: return 0.0;
      case InverterState::k3a:
      case InverterState::k3b: return half;
      case InverterState::k4: return cfg.V_dc;
    }
  }
  const auto& g = s.gates;
  const Node a = leg_node(g[0], g[1]);
  const Node b = leg_node(g[4], g[5]);
  return node_potential(a, caps) - node_potential(b, caps);
}

CapacitorBank cap_update(const CapacitorBank& caps, const SwitchState& s,
                         double I_load, double dt, const PwmConfig& cfg) {
  if (caps.mode == CapacitorMode::stiff) return caps;
  const auto& g = s.gates;
  const Node a = leg_node(g[0], g[1]);
  const Node b = leg_node(g[4], g[5]);

  const double i_src = caps.C * (cfg.V_dc - (caps.v_c1 + caps.v_c2)) /
                       (2.0 * caps.tau_src);
  // KCL at the two rails; the midpoint follows.
  double i_c1 = i_src;
  double i_c2 = i_src;
  if (a == Node::positive) i_c1 -= I_load;
  if (b == Node::positive) i_c1 += I_load;
  if (a == Node::negative) i_c2 += I_load;
  if (b == Node::negative) i_c2 -= I_load;

  CapacitorBank next = caps;
  next.v_c1 += i_c1 * dt / caps.C;
  next.v_c2 += i_c2 * dt / caps.C;
  return next;
}

int hbridge_level(double reference, double t, const PwmConfig& cfg) {
  PwmConfig three = cfg;
  three.n_levels = 3;
  return pwm_level(reference, carriers_at(t, three), cfg.table4_verbatim);
}

double hbridge_output(double reference, double t, const PwmConfig& cfg) {
  switch (hbridge_level(reference, t, cfg)) {
    case 0: return -cfg.V_dc;
    case 1: return 0.0;
    default: return cfg.V_dc;
  }
}

NormalizedReference normalize_reference(double V_cmd, double V_dc) {
  if (!(V_dc > 0.0)) throw ParameterError("normalization requires V_dc > 0");
  const double ratio = V_cmd / V_dc;
  NormalizedReference out;
  out.u = std::clamp(ratio, -1.0, 1.0);
  out.saturated = ratio > 1.0 || ratio < -1.0;
  return out;
}

PwmWaveform open_loop_waveform(const PwmConfig& cfg, double modulation,
                               double f_ref, std::size_t n_periods,
                               std::size_t samples_per_period) {
  validate(cfg);
  if (cfg.n_levels != 3 && cfg.n_levels != 5) {
    throw ParameterError("open-loop waveform supports 3 or 5 levels");
  }
  if (!(f_ref > 0.0) || n_periods == 0 || samples_per_period == 0) {
    throw ParameterError("open-loop waveform needs f_ref > 0 and a non-empty record");
  }
  const std::size_t n = n_periods * samples_per_period;
  const double dt = 1.0 / (f_ref * static_cast<double>(samples_per_period));
  const CapacitorBank caps = balanced_bank(cfg.V_dc, CapacitorMode::stiff);
  PwmWaveform out;
  out.t.reserve(n);
  out.level.reserve(n);
  out.v.reserve(n);
  SwitchState sw;
  int prev_level = -1;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double u = modulation * std::sin(2.0 * std::numbers::pi * f_ref * t);
    int level = 0;
    double v = 0.0;
    if (cfg.n_levels == 3) {
      level = hbridge_level(u, t, cfg);
      v = hbridge_output(u, t, cfg);
    } else {
      level = pwm_level(u, carriers_at(t, cfg), cfg.table4_verbatim);
      if (level != prev_level) sw = select_switch_state(level, sw);
      v = inverter_output(sw, caps, cfg);
    }
    prev_level = level;
    out.t.push_back(t);
    out.level.push_back(level);
    out.v.push_back(v);
  }
  return out;
}

}  // namespace drivesim
