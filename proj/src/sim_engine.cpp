#include "drivesim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drivesim/harmonics.hpp"
#include "drivesim/rk4.hpp"

namespace drivesim {

namespace {

// Steps of size `step` that fit in `span`; throws unless it is (nearly) an
// integer.
std::int64_t whole_steps(double span, double step, const char* constraint) {
  const double ratio = span / step;
  const double rounded = std::round(ratio);
  if (!std::isfinite(ratio) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ParameterError(std::string("scenario violates ") + constraint);
  }
  return static_cast<std::int64_t>(rounded);
}

using PlantVec = std::array<double, 3>;  // q, q_dot, I

MotorState to_state(const PlantVec& x, double t) { return {x[0], x[1], x[2], t}; }

double rms_tail(const Trace& trace, double TraceRecord::*field) {
  const std::size_t n = trace.size();
  const std::size_t tail = std::max<std::size_t>(1, (n + 4) / 5);
  double sum = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) {
    sum += trace[i].*field * trace[i].*field;
  }
  return std::sqrt(sum / static_cast<double>(tail));
}

// Drives the switching stage and remembers the bus and gate state between
// plant samples.
class VoltageStage {
 public:
  explicit VoltageStage(const Scenario& scn)
      : mode_(scn.mode), pwm_(scn.pwm.value_or(PwmConfig{})) {
    bus_ = balanced_bank(pwm_.V_dc, scn.capacitor_mode, scn.capacitance,
                         scn.tau_src);
    if (mode_ == Mode::inverter) pwm_.n_levels = 5;
    if (mode_ == Mode::hbridge) pwm_.n_levels = 3;
  }

  // Applied voltage at time t for normalized reference u (or raw V_cmd in
  // ideal mode).
  double sample(double t, double V_cmd, double u,
                RunResult& result) {
    switch (mode_) {
      case Mode::ideal:
        level_ = -1;
        return V_cmd;
      case Mode::hbridge:
        level_ = hbridge_level(u, t, pwm_);
        return pwm_.V_dc * (level_ - 1);
      case Mode::inverter: {
        const int level =
            pwm_level(u, carriers_at(t, pwm_), pwm_.table4_verbatim);
        if (level != level_) {
          switches_ = select_switch_state(level, switches_);
          level_ = level;
          ++result.state_entries[static_cast<std::size_t>(classify(switches_))];
        }
        ++result.state_samples[static_cast<std::size_t>(classify(switches_))];
        return inverter_output(switches_, bus_, pwm_);
      }
    }
    return V_cmd;
  }

  void after_step(double I_load, double dt) {
    if (mode_ == Mode::inverter) {
      bus_ = cap_update(bus_, switches_, I_load, dt, pwm_);
      if (!std::isfinite(bus_.v_c1) || !std::isfinite(bus_.v_c2)) {
        throw DivergenceError("v_c", "non-finite capacitor voltage");
      }
    }
  }

  int level() const { return level_; }
  double v_c1() const { return mode_ == Mode::ideal ? 0.0 : bus_.v_c1; }
  double v_c2() const { return mode_ == Mode::ideal ? 0.0 : bus_.v_c2; }
  double V_dc() const { return pwm_.V_dc; }

 private:
  Mode mode_;
  PwmConfig pwm_;
  CapacitorBank bus_;
  SwitchState switches_{};
  int level_ = -1;
};

}  // namespace

MotorState integrate_plant(const MotorState& s, double V, double h,
                           const PlantParams& p) {
  auto f = [&](double t, const PlantVec& x) -> PlantVec {
    const MotorState st = to_state(x, t);
    return {x[1], mechanical_derivative(st, p), electrical_derivative(st, V, p)};
  };
  const PlantVec x = rk4_step(f, s.t, PlantVec{s.q, s.q_dot, s.I}, h);
  return to_state(x, s.t + h);
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::ideal: return "ideal";
    case Mode::inverter: return "inverter";
    case Mode::hbridge: return "hbridge";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "ideal") return Mode::ideal;
  if (s == "inverter") return Mode::inverter;
  if (s == "hbridge") return Mode::hbridge;
  return std::nullopt;
}

void validate(const Scenario& scn) {
  validate(scn.plant);
  validate(scn.gains);
  if (!(scn.t_end >= 0.0) || !std::isfinite(scn.t_end)) {
    throw ParameterError("scenario violates t_end >= 0");
  }
  if (!(scn.dt_plant > 0.0)) throw ParameterError("scenario violates dt_plant > 0");
  if (!(scn.dt_ctrl > 0.0)) throw ParameterError("scenario violates dt_ctrl > 0");
  if (scn.dt_plant > scn.dt_ctrl * (1.0 + 1e-12)) {
    throw ParameterError("scenario violates dt_plant <= dt_ctrl");
  }
  whole_steps(scn.dt_ctrl, scn.dt_plant,
              "dt_ctrl is an integer multiple of dt_plant");
  whole_steps(scn.t_end, scn.dt_ctrl, "t_end is an integer multiple of dt_ctrl");
  if (scn.mode != Mode::ideal) {
    if (!scn.pwm) throw ParameterError("scenario violates pwm present for switched modes");
    validate(*scn.pwm);
    if (scn.dt_plant > 1.0 / (20.0 * scn.pwm->f_c) * (1.0 + 1e-12)) {
      throw ParameterError("scenario violates dt_plant <= 1/(20 f_c)");
    }
    if (scn.capacitor_mode == CapacitorMode::dynamic &&
        !(scn.capacitance > 0.0 && scn.tau_src > 0.0)) {
      throw ParameterError("scenario violates C > 0 and tau_src > 0");
    }
  }
  for (double x : {scn.initial.q, scn.initial.q_dot, scn.initial.I}) {
    if (!std::isfinite(x)) throw ParameterError("scenario violates finite initial state");
  }
}

RunResult run(const Scenario& scn) {
  validate(scn);
  RunResult result;
  result.scenario = scn;

  const std::int64_t n_ctrl = whole_steps(scn.t_end, scn.dt_ctrl, "t_end multiple");
  const std::int64_t substeps = whole_steps(scn.dt_ctrl, scn.dt_plant, "dt multiple");
  result.trace.reserve(static_cast<std::size_t>(n_ctrl + 1));

  VoltageStage stage(scn);
  MotorState plant = scn.initial;
  ControllerState ctrl;
  ctrl.theta_tau_hat = scn.theta_tau_hat0;
  ctrl.theta_1_hat = scn.theta_1_hat0;

  double t = 0.0;
  try {
    for (std::int64_t k = 0; k <= n_ctrl; ++k) {
      t = static_cast<double>(k) * scn.dt_ctrl;
      plant.t = t;
      check_divergence(plant);

      const ControllerOutput out = controller_step({plant.q, plant.q_dot, plant.I},
                                                   t, ctrl, scn.gains, scn.dt_ctrl);
      NormalizedReference ref{};
      if (scn.mode != Mode::ideal) {
        ref = normalize_reference(out.V_cmd, stage.V_dc());
        if (ref.saturated) ++result.metrics.saturation_count;
      }

      TraceRecord rec;
      const TrajectorySample traj = desired_trajectory(t);
      rec.t = t;
      rec.q = plant.q;
      rec.q_d = traj.q_d;
      rec.q_d_dot = traj.q_d_dot;
      rec.e = out.next.e;
      rec.e_dot = out.next.e_dot;
      rec.r = out.next.r;
      rec.q_dot = plant.q_dot;
      rec.I = plant.I;
      rec.I_d = out.next.I_d;
      rec.eta_I = out.next.eta_I;
      rec.V_cmd = out.V_cmd;
      rec.theta_tau_hat = ctrl.theta_tau_hat;
      rec.theta_1_hat = ctrl.theta_1_hat;

      // The closing record samples the applied voltage but does not advance.
      const std::int64_t plant_steps = k < n_ctrl ? substeps : 0;
      rec.V_applied = stage.sample(t, out.V_cmd, ref.u, result);
      rec.level = stage.level();
      rec.v_c1 = stage.v_c1();
      rec.v_c2 = stage.v_c2();
      result.trace.push_back(rec);

      double V = rec.V_applied;
      for (std::int64_t j = 0; j < plant_steps; ++j) {
        if (j > 0) {
          plant.t = t + static_cast<double>(j) * scn.dt_plant;
          V = stage.sample(plant.t, out.V_cmd, ref.u, result);
        }
        const double I_before = plant.I;
        plant = integrate_plant(plant, V, scn.dt_plant, scn.plant);
        plant.t = t + static_cast<double>(j + 1) * scn.dt_plant;
        check_divergence(plant);
        stage.after_step(I_before, scn.dt_plant);
      }
      ctrl = out.next;
    }
  } catch (const DivergenceError& err) {
    result.divergence = Divergence{err.field(), err.what(), plant.t};
  }

  const std::uint64_t saturation = result.metrics.saturation_count;
  if (!result.trace.empty()) {
    result.metrics = summary_metrics(result.trace, scn.thd_fundamental_hz);
  }
  result.metrics.saturation_count = saturation;
  return result;
}

SummaryMetrics summary_metrics(const Trace& trace, double thd_fundamental_hz) {
  if (trace.empty()) throw std::invalid_argument("summary of an empty trace");
  SummaryMetrics m;
  for (const auto& rec : trace) {
    if (std::abs(rec.e) > m.max_abs_e) {
      m.max_abs_e = std::abs(rec.e);
      m.t_max_abs_e = rec.t;
    }
    if (std::abs(rec.eta_I) > m.max_abs_eta) {
      m.max_abs_eta = std::abs(rec.eta_I);
      m.t_max_abs_eta = rec.t;
    }
  }
  m.rms_e_final = rms_tail(trace, &TraceRecord::e);
  m.rms_eta_final = rms_tail(trace, &TraceRecord::eta_I);

  // THD over the largest whole number of fundamental periods that ends at
  // the last record. Needs a uniform grid with an integer number of samples
  // per period.
  if (trace.size() >= 2 && thd_fundamental_hz > 0.0) {
    const double dt = trace[1].t - trace[0].t;
    const double per_period = 1.0 / (thd_fundamental_hz * dt);
    const double rounded = std::round(per_period);
    if (rounded >= 1.0 && std::abs(per_period - rounded) < 1e-6 * rounded) {
      const auto spp = static_cast<std::size_t>(rounded);
      // Samples are instants; the last record closes the final period.
      const std::size_t usable = trace.size() - 1;
      const std::size_t periods = usable / spp;
      if (periods >= 1) {
        std::vector<double> v;
        v.reserve(periods * spp);
        for (std::size_t i = trace.size() - 1 - periods * spp; i < trace.size() - 1; ++i) {
          v.push_back(trace[i].V_applied);
        }
        m.thd_v_applied = total_harmonic_distortion(v, periods);
      }
    }
  }
  return m;
}

ConvergenceReport step_convergence_check(const Scenario& scn) {
  if (scn.mode != Mode::ideal) {
    throw std::invalid_argument("convergence check requires ideal mode");
  }
  ConvergenceReport rep;
  Scenario s = scn;
  for (std::size_t i = 0; i < 3; ++i) {
    const RunResult res = run(s);
    if (res.divergence) {
      throw DivergenceError(res.divergence->field, res.divergence->message);
    }
    rep.q_end[i] = res.trace.back().q;
    s.dt_plant /= 2.0;
  }
  const double d1 = std::abs(rep.q_end[1] - rep.q_end[0]);
  const double d2 = std::abs(rep.q_end[2] - rep.q_end[1]);
  rep.delta_half = d1;
  rep.order = (d1 > 0.0 && d2 > 0.0) ? std::log2(d1 / d2) : 0.0;
  return rep;
}

}  // namespace drivesim
