#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/backstepping_controller.hpp"
#include "drivesim/inverter_pwm.hpp"
#include "drivesim/motor_dynamics.hpp"

namespace drivesim {

/// How the controller voltage reaches the motor.
enum class Mode { ideal, inverter, hbridge };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

/// Complete, deterministic description of one closed-loop run.
struct Scenario {
  std::string name = "unnamed";
  Mode mode = Mode::ideal;
  PlantParams plant = reference_plant();
  Gains gains{};
  std::optional<PwmConfig> pwm;
  CapacitorMode capacitor_mode = CapacitorMode::stiff;
  double capacitance = 4.7e-3;   ///< per bus capacitor [F]
  double tau_src = 10e-3;        ///< bus source regulation [s]
  double t_end = 10.0;
  double dt_plant = 1e-5;
  double dt_ctrl = 1e-4;
  MotorState initial{};
  Vec3 theta_tau_hat0{};
  Vec6 theta_1_hat0{};
  /// Fundamental used for THD of the applied voltage; the reference
  /// trajectory repeats at 0.8 Hz.
  double thd_fundamental_hz = kTrajectoryOmega / (2.0 * 3.14159265358979323846);
};

/// Throws ParameterError naming the violated constraint.
void validate(const Scenario& scn);

/// One controller-step sample of the closed loop.
struct TraceRecord {
  double t = 0.0;
  double q = 0.0;
  double q_d = 0.0;
  double q_d_dot = 0.0;
  double e = 0.0;
  double e_dot = 0.0;
  double r = 0.0;
  double q_dot = 0.0;
  double I = 0.0;
  double I_d = 0.0;
  double eta_I = 0.0;
  double V_cmd = 0.0;
  double V_applied = 0.0;
  int level = -1;  ///< PWM level index, -1 in ideal mode
  double v_c1 = 0.0;
  double v_c2 = 0.0;
  Vec3 theta_tau_hat{};  ///< estimates used at this step
  Vec6 theta_1_hat{};

  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

struct SummaryMetrics {
  double max_abs_e = 0.0;
  double t_max_abs_e = 0.0;
  double rms_e_final = 0.0;      ///< over the final 20 % of records
  double max_abs_eta = 0.0;
  double t_max_abs_eta = 0.0;
  double rms_eta_final = 0.0;
  std::optional<double> thd_v_applied;
  std::uint64_t saturation_count = 0;
};

struct Divergence {
  std::string field;
  std::string message;
  double t = 0.0;
};

struct RunResult {
  Scenario scenario;
  Trace trace;
  SummaryMetrics metrics;
  /// Number of times each switching-table row was selected.
  std::array<std::uint64_t, kInverterStateCount> state_entries{};
  /// Number of plant samples spent in each row.
  std::array<std::uint64_t, kInverterStateCount> state_samples{};
  std::optional<Divergence> divergence;
};

/// One RK4 step of both plant equations with V held over the step.
MotorState integrate_plant(const MotorState& s, double V, double h,
                           const PlantParams& p);

/// Closed-loop simulation. The controller runs every dt_ctrl under a
/// zero-order hold; the applied voltage is re-evaluated every dt_plant and
/// the plant is advanced by RK4. A divergence stops the run and keeps the
/// trace recorded so far.
RunResult run(const Scenario& scn);

/// Metrics over a trace. saturation_count is not derivable from the trace
/// and is left at zero.
SummaryMetrics summary_metrics(const Trace& trace,
                               double thd_fundamental_hz = 0.8);

struct ConvergenceReport {
  std::array<double, 3> q_end{};  ///< q(t_end) at dt, dt/2, dt/4
  double order = 0.0;             ///< Richardson order estimate
  double delta_half = 0.0;        ///< |q(dt/2) - q(dt)|
};

/// Reruns an ideal-mode scenario with dt_plant halved twice (dt_ctrl fixed)
/// and estimates the observed order of the plant integrator.
ConvergenceReport step_convergence_check(const Scenario& scn);

}  // namespace drivesim
