#include "drivesim/motor_dynamics.hpp"

#include <cmath>

namespace drivesim {

namespace {

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw DivergenceError(field, std::string("non-finite ") + field);
  }
}

void require(bool ok, const char* constraint) {
  if (!ok) {
    throw ParameterError(std::string("plant parameter violates ") + constraint);
  }
}

}  // namespace

void validate(const PlantParams& p) {
  for (double v : {p.R, p.L, p.K_B, p.M, p.B, p.N}) {
    require(std::isfinite(v), "finiteness");
  }
  require(p.R > 0.0, "R > 0");
  require(p.L > 0.0, "L > 0");
  require(p.K_B > 0.0, "K_B > 0");
  require(p.M > 0.0, "M > 0");
  require(p.B >= 0.0, "B >= 0");
  require(p.N >= 0.0, "N >= 0");
}

double electrical_derivative(const MotorState& state, double V,
                             const PlantParams& p) {
  require_finite(V, "V");
  require_finite(state.I, "I");
  require_finite(state.q_dot, "q_dot");
  return (V - state.I * p.R - state.q_dot * p.K_B) / p.L;
}

double mechanical_derivative(const MotorState& state, const PlantParams& p) {
  require_finite(state.q, "q");
  require_finite(state.q_dot, "q_dot");
  require_finite(state.I, "I");
  return (state.I - p.B * state.q_dot - p.N * std::sin(state.q)) / p.M;
}

LumpedParams derive_lumped_params(const LinkGeometry& link, double K_tau,
                                  double J, double B_0) {
  if (!(link.l > 0.0) || !(link.r_o > 0.0) || !(K_tau > 0.0) || !(J >= 0.0) ||
      !(B_0 >= 0.0) || !(link.m_0 >= 0.0) || !(link.m_1 >= 0.0) ||
      !(link.G >= 0.0)) {
    throw ParameterError(
        "link geometry requires l > 0, r_o > 0, K_tau > 0 and nonnegative "
        "J, B_0, masses, G");
  }
  const double l2 = link.l * link.l;
  const double inertia = J + link.m_1 * l2 / 3.0 + link.m_0 * l2 +
                         0.4 * link.m_0 * link.r_o * link.r_o;
  const double gravity =
      link.m_1 * link.l * link.G / 2.0 + link.m_0 * link.l * link.G;
  return {inertia / K_tau, B_0 / K_tau, gravity / K_tau};
}

PlantParams reference_plant() {
  PlantParams p;
  const auto lumped = derive_lumped_params(p.link, kDefaultTorqueConstant,
                                           kDefaultRotorInertia,
                                           kDefaultRawFriction);
  p.M = lumped.M;
  p.B = lumped.B;
  p.N = lumped.N;
  return p;
}

void check_divergence(const MotorState& state) {
  require_finite(state.q, "q");
  require_finite(state.q_dot, "q_dot");
  require_finite(state.I, "I");
  if (std::abs(state.q_dot) > kDivergenceBound) {
    throw DivergenceError("q_dot", "|q_dot| exceeded 1e6 rad/s at t = " +
                                       std::to_string(state.t));
  }
  if (std::abs(state.I) > kDivergenceBound) {
    throw DivergenceError("I", "|I| exceeded 1e6 A at t = " +
                                   std::to_string(state.t));
  }
}

}  // namespace drivesim
