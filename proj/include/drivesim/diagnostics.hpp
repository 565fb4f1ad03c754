#pragma once

#include <cstddef>

#include "drivesim/backstepping_controller.hpp"
#include "drivesim/motor_dynamics.hpp"
#include "drivesim/sim_engine.hpp"

// Post-run checks of a closed-loop trace against the true plant. These use
// knowledge the controller never has (the true parameter vectors).

namespace drivesim {

/// [M, B, N]
Vec3 true_theta_tau(const PlantParams& p);

/// [L/M, LB/M, R, K_B, LN/M, L]
Vec6 true_theta_1(const PlantParams& p);

/// E = M r^2/2 + L eta^2/2 + theta_tau_err' Gamma_tau^-1 theta_tau_err / 2
///   + theta_1_err' Gamma_e^-1 theta_1_err / 2, with errors = true - estimate.
double lyapunov_energy(const TraceRecord& rec, const PlantParams& p,
                       const Gains& g);

struct LyapunovReport {
  std::size_t steps = 0;
  std::size_t within_slack = 0;
  double worst_excess = 0.0;  ///< largest (dE - slack) over all steps
  double fraction() const {
    return steps == 0 ? 1.0 : static_cast<double>(within_slack) / static_cast<double>(steps);
  }
};

/// Counts controller steps whose energy rise stays within
/// 10 dt max(|r|, |eta_I|)^2 (max over both samples).
LyapunovReport lyapunov_check(const Trace& trace, const PlantParams& p,
                              const Gains& g, double dt_ctrl);

struct ResidualReport {
  std::size_t intervals = 0;
  std::size_t failures = 0;
  double worst_ratio = 0.0;      ///< max |residual| / tolerance
  double max_electrical = 0.0;   ///< max |residual| of L I' = V - IR - q' K_B [V]
  double max_mechanical = 0.0;   ///< max |residual| of M q'' + B q' + N sin q = I [A]
};

/// Reconstructs both plant equations between consecutive records by
/// trapezoidal finite differences, assuming the recorded applied voltage is
/// held over each interval (ideal mode). Each residual is compared against
/// 10 times the trapezoid truncation bound H^2/12 max|f''| evaluated from
/// the model at both interval ends, plus a roundoff floor of 1e-9.
ResidualReport residual_check(const Trace& trace, const PlantParams& p);

struct ConsistencyReport {
  std::size_t steps = 0;
  double max_abs_error = 0.0;
  double max_abs_rate = 0.0;
};

/// Compares the finite-difference rate of the mechanical estimates with
/// Gamma_tau W_tau^T r (equivalently d/dt theta_tau_err = -Gamma_tau W_tau^T r).
ConsistencyReport adaptation_consistency(const Trace& trace, const Gains& g,
                                         double dt_ctrl);

/// Residual of M r' = W_tau theta_tau_err - K_s r + eta_I with r' from
/// central differences of the recorded r.
ConsistencyReport error_dynamics_check(const Trace& trace, const PlantParams& p,
                                       const Gains& g, double dt_ctrl);

}  // namespace drivesim
