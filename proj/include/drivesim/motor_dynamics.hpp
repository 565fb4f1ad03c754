#pragma once

#include <stdexcept>
#include <string>

namespace drivesim {

/// Raised when a simulated signal leaves the finite, bounded region.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}

  /// Name of the offending signal, e.g. "q_dot" or "I".
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised for physically invalid plant or controller parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Single-link load geometry and masses.
struct LinkGeometry {
  double l = 0.305;       ///< link length [m]
  double r_o = 0.023;     ///< load radius [m]
  double m_0 = 0.434;     ///< link mass [kg]
  double m_1 = 0.506;     ///< load mass [kg]
  double G = 9.81;        ///< gravitational acceleration [m/s^2]
};

/// Brushed DC motor with lumped single-link load. M, B and N already
/// include the division by the torque constant, so the mechanical equation
/// reads M q'' + B q' + N sin(q) = I with I in amperes.
struct PlantParams {
  double R = 5.0;       ///< armature resistance [ohm]
  double L = 25e-3;     ///< armature inductance [H]
  double K_B = 0.9;     ///< back-EMF coefficient [V s/rad]
  double M = 0.0;       ///< lumped inertia [kg m^2 / (N m/A)]
  double B = 0.0;       ///< lumped viscous friction [N m s/rad / (N m/A)]
  double N = 0.0;       ///< lumped gravity term [N m / (N m/A)]
  LinkGeometry link{};
};

/// Electromechanical plant state.
struct MotorState {
  double q = 0.0;      ///< angular position [rad]
  double q_dot = 0.0;  ///< angular velocity [rad/s]
  double I = 0.0;      ///< armature current [A]
  double t = 0.0;      ///< time [s]
};

struct LumpedParams {
  double M;
  double B;
  double N;
};

/// Throws ParameterError naming the first violated constraint.
void validate(const PlantParams& p);

/// Current derivative from the armature circuit: L dI/dt = V - I R - q' K_B.
double electrical_derivative(const MotorState& state, double V,
                             const PlantParams& p);

/// Angular acceleration from M q'' + B q' + N sin(q) = I.
double mechanical_derivative(const MotorState& state, const PlantParams& p);

/// Rigid single-link lumping of rotor inertia J, raw viscous friction B_0
/// and the link/load masses, normalized by the torque constant K_tau.
LumpedParams derive_lumped_params(const LinkGeometry& link, double K_tau,
                                  double J, double B_0);

/// Rotor inertia and raw viscous friction used when a scenario does not
/// override M, B, N directly. Not measured values; chosen as plausible for
/// a small brushed servo motor.
inline constexpr double kDefaultRotorInertia = 1.625e-3;     // kg m^2
inline constexpr double kDefaultRawFriction = 16.25e-3;      // N m s/rad
inline constexpr double kDefaultTorqueConstant = 0.9;        // N m/A

/// R, L, K_B and link data of the reference test bench with M, B, N lumped
/// from the default rotor inertia and friction.
PlantParams reference_plant();

/// Bound beyond which a run is treated as diverged.
inline constexpr double kDivergenceBound = 1e6;

/// Throws DivergenceError if any state field is non-finite or |q'|, |I|
/// exceed kDivergenceBound.
void check_divergence(const MotorState& state);

}  // namespace drivesim
