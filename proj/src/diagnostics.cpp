#include "drivesim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drivesim {

namespace {

// Second time derivatives of the quadrature integrands with V held.
struct Curvature {
  double electrical;  // d2/dt2 (R I + K_B q')
  double mechanical;  // d2/dt2 (I - B q' - N sin q)
};

Curvature curvature(const TraceRecord& rec, double V, const PlantParams& p) {
  const double I_dot = (V - p.R * rec.I - p.K_B * rec.q_dot) / p.L;
  const double q_ddot = (rec.I - p.B * rec.q_dot - p.N * std::sin(rec.q)) / p.M;
  const double I_ddot = (-p.R * I_dot - p.K_B * q_ddot) / p.L;
  const double q_dddot =
      (I_dot - p.B * q_ddot - p.N * std::cos(rec.q) * rec.q_dot) / p.M;
  return {p.R * I_ddot + p.K_B * q_dddot,
          I_ddot - p.B * q_dddot +
              p.N * std::sin(rec.q) * rec.q_dot * rec.q_dot -
              p.N * std::cos(rec.q) * q_ddot};
}

Vec3 w_tau_of(const TraceRecord& rec, const Gains& g) {
  return regression_w_tau(desired_trajectory(rec.t), rec.e_dot, rec.q,
                          rec.q_dot, g);
}

}  // namespace

Vec3 true_theta_tau(const PlantParams& p) { return {p.M, p.B, p.N}; }

Vec6 true_theta_1(const PlantParams& p) {
  return {p.L / p.M, p.L * p.B / p.M, p.R, p.K_B, p.L * p.N / p.M, p.L};
}

double lyapunov_energy(const TraceRecord& rec, const PlantParams& p,
                       const Gains& g) {
  double E = 0.5 * p.M * rec.r * rec.r + 0.5 * p.L * rec.eta_I * rec.eta_I;
  const Vec3 tau = true_theta_tau(p);
  for (std::size_t i = 0; i < 3; ++i) {
    const double err = tau[i] - rec.theta_tau_hat[i];
    E += 0.5 * err * err / g.gamma_tau[i];
  }
  const Vec6 one = true_theta_1(p);
  for (std::size_t i = 0; i < 6; ++i) {
    const double err = one[i] - rec.theta_1_hat[i];
    E += 0.5 * err * err / g.gamma_e[i];
  }
  return E;
}

LyapunovReport lyapunov_check(const Trace& trace, const PlantParams& p,
                              const Gains& g, double dt_ctrl) {
  LyapunovReport rep;
  if (trace.size() < 2) return rep;
  const Vec3 tau = true_theta_tau(p);
  const Vec6 one = true_theta_1(p);
  // (b^2 - a^2) / 2 without cancelling against the large absolute energy.
  const auto half_diff = [](double a, double b) { return 0.5 * (b - a) * (b + a); };
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const TraceRecord& a = trace[k];
    const TraceRecord& b = trace[k + 1];
    double dE = p.M * half_diff(a.r, b.r) + p.L * half_diff(a.eta_I, b.eta_I);
    for (std::size_t i = 0; i < 3; ++i) {
      dE += half_diff(tau[i] - a.theta_tau_hat[i], tau[i] - b.theta_tau_hat[i]) /
            g.gamma_tau[i];
    }
    for (std::size_t i = 0; i < 6; ++i) {
      dE += half_diff(one[i] - a.theta_1_hat[i], one[i] - b.theta_1_hat[i]) /
            g.gamma_e[i];
    }
    const double scale = std::max({std::abs(trace[k].r), std::abs(trace[k].eta_I),
                                   std::abs(trace[k + 1].r),
                                   std::abs(trace[k + 1].eta_I)});
    const double slack = 10.0 * dt_ctrl * scale * scale;
    const double excess = dE - slack;
    ++rep.steps;
    if (excess <= 0.0) ++rep.within_slack;
    if (k == 0 || excess > rep.worst_excess) rep.worst_excess = excess;
  }
  return rep;
}

ResidualReport residual_check(const Trace& trace, const PlantParams& p) {
  constexpr double kFloor = 1e-9;
  ResidualReport rep;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const TraceRecord& a = trace[k];
    const TraceRecord& b = trace[k + 1];
    const double H = b.t - a.t;
    if (!(H > 0.0)) throw std::invalid_argument("trace time is not increasing");
    const double V = a.V_applied;

    const double res_e = p.L * (b.I - a.I) / H - V + p.R * 0.5 * (a.I + b.I) +
                         p.K_B * 0.5 * (a.q_dot + b.q_dot);
    const double res_m = p.M * (b.q_dot - a.q_dot) / H - 0.5 * (a.I + b.I) +
                         p.B * 0.5 * (a.q_dot + b.q_dot) +
                         p.N * 0.5 * (std::sin(a.q) + std::sin(b.q));

    const Curvature ca = curvature(a, V, p);
    const Curvature cb = curvature(b, V, p);
    const double bound = H * H / 12.0;
    const double tol_e =
        10.0 * bound * std::max(std::abs(ca.electrical), std::abs(cb.electrical)) + kFloor;
    const double tol_m =
        10.0 * bound * std::max(std::abs(ca.mechanical), std::abs(cb.mechanical)) + kFloor;

    ++rep.intervals;
    const double ratio = std::max(std::abs(res_e) / tol_e, std::abs(res_m) / tol_m);
    if (ratio > 1.0) ++rep.failures;
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    rep.max_electrical = std::max(rep.max_electrical, std::abs(res_e));
    rep.max_mechanical = std::max(rep.max_mechanical, std::abs(res_m));
  }
  return rep;
}

ConsistencyReport adaptation_consistency(const Trace& trace, const Gains& g,
                                         double dt_ctrl) {
  ConsistencyReport rep;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const Vec3 W = w_tau_of(trace[k], g);
    for (std::size_t i = 0; i < 3; ++i) {
      const double fd =
          (trace[k + 1].theta_tau_hat[i] - trace[k].theta_tau_hat[i]) / dt_ctrl;
      const double law = g.gamma_tau[i] * W[i] * trace[k].r;
      rep.max_abs_error = std::max(rep.max_abs_error, std::abs(fd - law));
      rep.max_abs_rate = std::max(rep.max_abs_rate, std::abs(law));
    }
    ++rep.steps;
  }
  return rep;
}

ConsistencyReport error_dynamics_check(const Trace& trace, const PlantParams& p,
                                       const Gains& g, double dt_ctrl) {
  ConsistencyReport rep;
  const Vec3 tau = true_theta_tau(p);
  for (std::size_t k = 1; k + 1 < trace.size(); ++k) {
    const TraceRecord& rec = trace[k];
    const double r_dot = (trace[k + 1].r - trace[k - 1].r) / (2.0 * dt_ctrl);
    const Vec3 W = w_tau_of(rec, g);
    double w_err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) w_err += W[i] * (tau[i] - rec.theta_tau_hat[i]);
    const double rhs = w_err - g.K_s * rec.r + rec.eta_I;
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(p.M * r_dot - rhs));
    rep.max_abs_rate = std::max(rep.max_abs_rate, std::abs(p.M * r_dot));
    ++rep.steps;
  }
  return rep;
}

}  // namespace drivesim
