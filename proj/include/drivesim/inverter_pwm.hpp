#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace drivesim {

/// Level-shifted carrier PWM settings.
struct PwmConfig {
  double V_dc = 100.0;   ///< bus voltage [V]
  double f_c = 5000.0;   ///< carrier frequency [Hz]
  int n_levels = 5;      ///< 5 for the diode-clamped inverter, 3 for the H-bridge
  /// Use the literal "carrier > reference -> 1" comparison, which inverts the
  /// level ordering. Off by default: reference >= carrier -> 1.
  bool table4_verbatim = false;
};

/// Throws ParameterError unless V_dc > 0, f_c > 0 and n_levels >= 2.
void validate(const PwmConfig& cfg);

/// The seven rows of the five-level leg-pair switching table. Half-levels
/// have two redundant realizations each.
enum class InverterState { k0, k1a, k1b, k2, k3a, k3b, k4 };

inline constexpr std::size_t kInverterStateCount = 7;

std::string_view to_string(InverterState s);

/// Gate signals S1..S8 (index 0..7) plus the redundancy toggles. A toggle is
/// false when the next request for its half-level selects the "a" row.
struct SwitchState {
  std::array<bool, 8> gates{false, true, true, false, false, true, true, false};
  bool balance_toggle_half_neg = false;
  bool balance_toggle_half_pos = false;

  bool operator==(const SwitchState&) const = default;
};

/// Gate pattern of a switching-table row. Complementary gates are filled in.
std::array<bool, 8> gates_of(InverterState s);

/// Table row of a gate pattern. Throws std::logic_error if the gates break a
/// complementary pair or match no row.
InverterState classify(const SwitchState& s);

enum class CapacitorMode { stiff, dynamic };

/// Split DC bus. v_c1 sits between the positive rail and the midpoint, v_c2
/// between the midpoint and the negative rail.
struct CapacitorBank {
  double v_c1 = 50.0;
  double v_c2 = 50.0;
  double C = 4.7e-3;       ///< each capacitor [F]
  double tau_src = 10e-3;  ///< source regulation time constant [s]
  CapacitorMode mode = CapacitorMode::stiff;
};

/// Balanced bank for the given bus voltage.
CapacitorBank balanced_bank(double V_dc, CapacitorMode mode,
                            double C = 4.7e-3, double tau_src = 10e-3);

/// Values of the n_levels - 1 in-phase triangular carriers at time t. Carrier
/// k spans [-1 + 2k/(n-1), -1 + 2(k+1)/(n-1)], starts at its band minimum at
/// t = 0 and peaks at t = 1/(2 f_c).
std::vector<double> carriers_at(double t, const PwmConfig& cfg);

/// Number of carriers the clamped reference sits on or above (or, with
/// table4_verbatim, the number of carriers strictly above the reference).
int pwm_level(double reference, const std::vector<double>& carriers,
              bool table4_verbatim = false);

/// Switch pattern for level k in 0..4. Half-levels alternate between their
/// a and b rows on successive requests. Throws std::out_of_range otherwise.
SwitchState select_switch_state(int level, const SwitchState& prev);

/// Leg-pair output voltage. Stiff buses give exactly 0, +-V_dc/2, +-V_dc;
/// dynamic buses use the tapped capacitor voltages.
double inverter_output(const SwitchState& s, const CapacitorBank& caps,
                       const PwmConfig& cfg);

/// Advances the dynamic bus by dt with motor current I_load flowing out of
/// leg A and back into leg B. Stiff banks are returned unchanged.
CapacitorBank cap_update(const CapacitorBank& caps, const SwitchState& s,
                         double I_load, double dt, const PwmConfig& cfg);

/// Three-level H-bridge level (0, 1, 2) from two level-shifted carriers.
int hbridge_level(double reference, double t, const PwmConfig& cfg);

/// Three-level H-bridge output in {-V_dc, 0, +V_dc}.
double hbridge_output(double reference, double t, const PwmConfig& cfg);

struct NormalizedReference {
  double u = 0.0;
  bool saturated = false;
};

/// u = clamp(V_cmd / V_dc, -1, 1).
NormalizedReference normalize_reference(double V_cmd, double V_dc);

/// Sampled open-loop output for a sinusoidal reference.
struct PwmWaveform {
  std::vector<double> t;
  std::vector<int> level;
  std::vector<double> v;
};

/// Drives a stiff five-level leg pair (n_levels == 5) or the three-level
/// H-bridge (n_levels == 3) with u(t) = modulation sin(2 pi f_ref t) for
/// n_periods reference periods at samples_per_period points each.
PwmWaveform open_loop_waveform(const PwmConfig& cfg, double modulation,
                               double f_ref, std::size_t n_periods,
                               std::size_t samples_per_period);

}  // namespace drivesim
