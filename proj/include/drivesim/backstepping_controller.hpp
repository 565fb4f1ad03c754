#pragma once

#include <array>

namespace drivesim {

using Vec3 = std::array<double, 3>;
using Vec6 = std::array<double, 6>;

/// Sign of the alpha M_hat q' term in the second electrical regressor entry.
/// `consistent` uses +alpha M_hat q', which makes W_1 theta_1 equal
/// L dI_d/dt + R I + K_B q' exactly for theta_1 = [L/M, LB/M, R, K_B, LN/M, L].
/// `as_printed` keeps the published -alpha M_hat q'.
enum class W1Variant { consistent, as_printed };

/// Controller gains. The adaptive gain matrices are diagonal and stored as
/// their diagonals.
struct Gains {
  double alpha = 35.0;                      ///< filtered-error gain [1/s]
  double K_s = 10.0;                        ///< current-loop gain
  double K_e = 1.0;                         ///< voltage-loop gain
  Vec3 gamma_tau{0.01, 5.0, 5.0};           ///< diag of mechanical adaptation gain
  Vec6 gamma_e{0.01, 0.01, 0.01, 0.01, 0.01, 0.01};  ///< diag of electrical adaptation gain
  W1Variant w1_variant = W1Variant::consistent;
};

/// Throws ParameterError unless alpha, K_s, K_e and every diagonal entry
/// are strictly positive and finite.
void validate(const Gains& g);

/// Desired position and its first three time derivatives.
struct TrajectorySample {
  double q_d = 0.0;
  double q_d_dot = 0.0;
  double q_d_ddot = 0.0;
  double q_d_dddot = 0.0;
};

/// Tracking errors e = q_d - q, e' = q_d' - q' and filtered error
/// r = e' + alpha e.
struct TrackingErrors {
  double e = 0.0;
  double e_dot = 0.0;
  double r = 0.0;
};

/// Estimates carried between controller steps plus the intermediates of the
/// most recent step (for tracing).
struct ControllerState {
  Vec3 theta_tau_hat{};  ///< [M_hat, B_hat, N_hat]
  Vec6 theta_1_hat{};
  double e = 0.0;
  double e_dot = 0.0;
  double r = 0.0;
  double I_d = 0.0;
  double eta_I = 0.0;
  double V_cmd = 0.0;
  Vec3 W_tau{};
  Vec6 W_1{};
};

/// Plant measurements available to the controller (full-state feedback).
struct PlantReadout {
  double q = 0.0;
  double q_dot = 0.0;
  double I = 0.0;
};

/// Frequency of the reference sinusoid [rad/s].
inline constexpr double kTrajectoryOmega = 8.0 * 3.14159265358979323846 / 5.0;

/// q_d(t) = pi/2 (1 - exp(-0.1 t^3)) sin(8 pi t / 5) and its analytic
/// derivatives. Throws std::domain_error for t < 0.
TrajectorySample desired_trajectory(double t);

TrackingErrors tracking_errors(double q, double q_dot,
                               const TrajectorySample& traj, const Gains& g);

/// Mechanical regressor [q_d'' + alpha e', q', sin(q)].
Vec3 regression_w_tau(const TrajectorySample& traj, double e_dot, double q,
                      double q_dot, const Gains& g);

/// I_d = W_tau theta_tau_hat + K_s r.
double desired_current(const Vec3& W_tau, const Vec3& theta_tau_hat, double r,
                       const Gains& g);

/// One rectangular step of theta_tau_hat' = Gamma_tau W_tau^T r.
Vec3 update_theta_tau(const Vec3& theta_tau_hat, const Vec3& W_tau, double r,
                      const Gains& g, double dt);

/// Current tracking error eta_I = I_d - I.
constexpr double eta(double I_d, double I) { return I_d - I; }

/// Electrical regressor. The six entries are, in order,
///   (B_hat - K_s - alpha M_hat) I
///   (K_s - B_hat + alpha M_hat) q'   (minus alpha M_hat when as_printed)
///   I
///   q'
///   (K_s - B_hat + alpha M_hat) sin(q)
///   M_hat q_d''' + alpha M_hat q_d'' + (W_tau Gamma_tau W_tau^T) r
///     + K_s q_d'' + K_s alpha e' + N_hat q' cos(q)
Vec6 regression_w1(double q, double q_dot, double I, const Vec3& theta_tau_hat,
                   const TrajectorySample& traj, double e, double e_dot,
                   double r, const Vec3& W_tau, const Gains& g);

/// V = W_1 theta_1_hat + K_e eta_I + r.
double control_voltage(const Vec6& W_1, const Vec6& theta_1_hat, double eta_I,
                       double r, const Gains& g);

/// One rectangular step of theta_1_hat' = Gamma_e W_1^T eta_I.
Vec6 update_theta_1(const Vec6& theta_1_hat, const Vec6& W_1, double eta_I,
                    const Gains& g, double dt);

struct ControllerOutput {
  double V_cmd = 0.0;
  /// Intermediates of this step with the estimates advanced by dt.
  ControllerState next;
};

/// Full control law: trajectory, errors, W_tau, I_d, eta_I, W_1, V, then
/// both adaptation updates. Throws DivergenceError on non-finite readout or
/// output, std::invalid_argument for dt <= 0.
ControllerOutput controller_step(const PlantReadout& plant, double t,
                                 const ControllerState& state, const Gains& g,
                                 double dt);

}  // namespace drivesim
