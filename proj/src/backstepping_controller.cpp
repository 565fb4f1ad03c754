#include "drivesim/backstepping_controller.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "drivesim/motor_dynamics.hpp"

namespace drivesim {

namespace {

template <std::size_t N>
double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) sum += a[i] * b[i];
  return sum;
}

template <std::size_t N>
void require_finite(const std::array<double, N>& v, const char* field) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw DivergenceError(field, std::string("non-finite ") + field);
    }
  }
}

void require_finite(double x, const char* field) {
  if (!std::isfinite(x)) {
    throw DivergenceError(field, std::string("non-finite ") + field);
  }
}

}  // namespace

void validate(const Gains& g) {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(g.alpha)) throw ParameterError("gain violates alpha > 0");
  if (!positive(g.K_s)) throw ParameterError("gain violates K_s > 0");
  if (!positive(g.K_e)) throw ParameterError("gain violates K_e > 0");
  for (double x : g.gamma_tau) {
    if (!positive(x)) throw ParameterError("gain violates Gamma_tau > 0");
  }
  for (double x : g.gamma_e) {
    if (!positive(x)) throw ParameterError("gain violates Gamma_e > 0");
  }
}

TrajectorySample desired_trajectory(double t) {
  if (!(t >= 0.0)) {
    throw std::domain_error("desired trajectory is defined for t >= 0");
  }
  constexpr double amplitude = std::numbers::pi / 2.0;
  constexpr double w = kTrajectoryOmega;

  // Envelope g(t) = 1 - h(t), h(t) = exp(-0.1 t^3).
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h = std::exp(-0.1 * t3);
  const double g0 = 1.0 - h;
  const double g1 = 0.3 * t2 * h;
  const double g2 = h * (0.6 * t - 0.09 * t3 * t);
  const double g3 = h * (0.6 - 0.54 * t3 + 0.027 * t3 * t3);

  const double s = std::sin(w * t);
  const double c = std::cos(w * t);
  const double s0 = s;
  const double s1 = w * c;
  const double s2 = -w * w * s;
  const double s3 = -w * w * w * c;

  TrajectorySample out;
  out.q_d = amplitude * g0 * s0;
  out.q_d_dot = amplitude * (g1 * s0 + g0 * s1);
  out.q_d_ddot = amplitude * (g2 * s0 + 2.0 * g1 * s1 + g0 * s2);
  out.q_d_dddot =
      amplitude * (g3 * s0 + 3.0 * g2 * s1 + 3.0 * g1 * s2 + g0 * s3);
  return out;
}

TrackingErrors tracking_errors(double q, double q_dot,
                               const TrajectorySample& traj, const Gains& g) {
  TrackingErrors out;
  out.e = traj.q_d - q;
  out.e_dot = traj.q_d_dot - q_dot;
  out.r = out.e_dot + g.alpha * out.e;
  return out;
}

Vec3 regression_w_tau(const TrajectorySample& traj, double e_dot, double q,
                      double q_dot, const Gains& g) {
  return {traj.q_d_ddot + g.alpha * e_dot, q_dot, std::sin(q)};
}

double desired_current(const Vec3& W_tau, const Vec3& theta_tau_hat, double r,
                       const Gains& g) {
  return dot(W_tau, theta_tau_hat) + g.K_s * r;
}

Vec3 update_theta_tau(const Vec3& theta_tau_hat, const Vec3& W_tau, double r,
                      const Gains& g, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Vec3 out = theta_tau_hat;
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] += g.gamma_tau[i] * W_tau[i] * r * dt;
  }
  return out;
}

Vec6 regression_w1(double q, double q_dot, double I, const Vec3& theta_tau_hat,
                   const TrajectorySample& traj, double e, double e_dot,
                   double r, const Vec3& W_tau, const Gains& g) {
  (void)e;
  const double M_hat = theta_tau_hat[0];
  const double B_hat = theta_tau_hat[1];
  const double N_hat = theta_tau_hat[2];
  const double sin_q = std::sin(q);

  double quad = 0.0;  // W_tau Gamma_tau W_tau^T
  for (std::size_t i = 0; i < 3; ++i) quad += g.gamma_tau[i] * W_tau[i] * W_tau[i];

  Vec6 W;
  W[0] = B_hat * I - g.K_s * I - g.alpha * M_hat * I;
  const double alpha_m = g.w1_variant == W1Variant::as_printed
                             ? -g.alpha * M_hat
                             : g.alpha * M_hat;
  W[1] = g.K_s * q_dot - B_hat * q_dot + alpha_m * q_dot;
  W[2] = I;
  W[3] = q_dot;
  W[4] = g.K_s * sin_q - B_hat * sin_q + g.alpha * M_hat * sin_q;
  W[5] = M_hat * traj.q_d_dddot + g.alpha * M_hat * traj.q_d_ddot + quad * r +
         g.K_s * traj.q_d_ddot + g.K_s * g.alpha * e_dot +
         N_hat * q_dot * std::cos(q);
  return W;
}

double control_voltage(const Vec6& W_1, const Vec6& theta_1_hat, double eta_I,
                       double r, const Gains& g) {
  return dot(W_1, theta_1_hat) + g.K_e * eta_I + r;
}

Vec6 update_theta_1(const Vec6& theta_1_hat, const Vec6& W_1, double eta_I,
                    const Gains& g, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Vec6 out = theta_1_hat;
  for (std::size_t i = 0; i < 6; ++i) {
    out[i] += g.gamma_e[i] * W_1[i] * eta_I * dt;
  }
  return out;
}

ControllerOutput controller_step(const PlantReadout& plant, double t,
                                 const ControllerState& state, const Gains& g,
                                 double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  require_finite(plant.q, "q");
  require_finite(plant.q_dot, "q_dot");
  require_finite(plant.I, "I");

  const TrajectorySample traj = desired_trajectory(t);
  const TrackingErrors err = tracking_errors(plant.q, plant.q_dot, traj, g);
  const Vec3 W_tau = regression_w_tau(traj, err.e_dot, plant.q, plant.q_dot, g);
  const double I_d = desired_current(W_tau, state.theta_tau_hat, err.r, g);
  const double eta_I = eta(I_d, plant.I);
  const Vec6 W_1 = regression_w1(plant.q, plant.q_dot, plant.I,
                                 state.theta_tau_hat, traj, err.e, err.e_dot,
                                 err.r, W_tau, g);
  const double V = control_voltage(W_1, state.theta_1_hat, eta_I, err.r, g);

  ControllerOutput out;
  out.V_cmd = V;
  ControllerState& next = out.next;
  next.theta_tau_hat = update_theta_tau(state.theta_tau_hat, W_tau, err.r, g, dt);
  next.theta_1_hat = update_theta_1(state.theta_1_hat, W_1, eta_I, g, dt);
  next.e = err.e;
  next.e_dot = err.e_dot;
  next.r = err.r;
  next.I_d = I_d;
  next.eta_I = eta_I;
  next.V_cmd = V;
  next.W_tau = W_tau;
  next.W_1 = W_1;

  require_finite(V, "V_cmd");
  require_finite(next.theta_tau_hat, "theta_tau_hat");
  require_finite(next.theta_1_hat, "theta_1_hat");
  return out;
}

}  // namespace drivesim
