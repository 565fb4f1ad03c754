// Randomized invariant checks with fixed seeds.

#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "drivesim/backstepping_controller.hpp"
#include "drivesim/harmonics.hpp"
#include "drivesim/inverter_pwm.hpp"
#include "drivesim/motor_dynamics.hpp"
#include "drivesim/sim_engine.hpp"
#include "drivesim/trace_csv.hpp"

using namespace drivesim;

namespace {

constexpr int kCases = 500;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  // Any finite double, including subnormals and extreme exponents.
  double any_finite() {
    while (true) {
      const double v = std::bit_cast<double>(rng());
      if (std::isfinite(v)) return v;
    }
  }
};

}  // namespace

TEST_CASE("switch selection keeps complementary pairs and alternates fairly") {
  Gen g(1);
  for (int c = 0; c < 50; ++c) {
    SwitchState s;
    int n1a = 0, n1b = 0, n3a = 0, n3b = 0;
    for (int i = 0; i < 400; ++i) {
      s = select_switch_state(g.integer(0, 4), s);
      const auto& x = s.gates;
      REQUIRE((x[0] != x[2] && x[1] != x[3] && x[4] != x[6] && x[5] != x[7]));
      switch (classify(s)) {
        case InverterState::k1a: ++n1a; break;
        case InverterState::k1b: ++n1b; break;
        case InverterState::k3a: ++n3a; break;
        case InverterState::k3b: ++n3b; break;
        default: break;
      }
      REQUIRE(std::abs(n1a - n1b) <= 1);
      REQUIRE(std::abs(n3a - n3b) <= 1);
    }
  }
}

TEST_CASE("level is monotone in the reference") {
  Gen g(2);
  const PwmConfig cfg;
  for (int c = 0; c < kCases; ++c) {
    const auto carriers = carriers_at(g.uniform(0.0, 1.0), cfg);
    const double a = g.uniform(-1.2, 1.2);
    const double b = g.uniform(-1.2, 1.2);
    const double lo = std::min(a, b), hi = std::max(a, b);
    REQUIRE(pwm_level(lo, carriers) <= pwm_level(hi, carriers));
    REQUIRE(pwm_level(lo, carriers, true) >= pwm_level(hi, carriers, true));
    const int k = pwm_level(a, carriers);
    REQUIRE(k >= 0);
    REQUIRE(k <= 4);
  }
}

TEST_CASE("constant reference never skips a level between samples") {
  Gen g(3);
  const PwmConfig cfg;
  const double dt = 1.0 / (cfg.f_c * 200.0);
  for (int c = 0; c < 100; ++c) {
    const double u = g.uniform(-1.0, 1.0);
    int prev = pwm_level(u, carriers_at(0.0, cfg));
    for (int i = 1; i <= 400; ++i) {
      const int k = pwm_level(u, carriers_at(i * dt, cfg));
      REQUIRE(std::abs(k - prev) <= 1);
      prev = k;
    }
  }
}

TEST_CASE("stiff leg-pair output follows the level") {
  Gen g(4);
  const PwmConfig cfg;
  const CapacitorBank caps = balanced_bank(cfg.V_dc, CapacitorMode::stiff);
  SwitchState s;
  for (int c = 0; c < kCases; ++c) {
    const int k = g.integer(0, 4);
    s = select_switch_state(k, s);
    REQUIRE(inverter_output(s, caps, cfg) == cfg.V_dc / 2.0 * (k - 2));
  }
}

TEST_CASE("dynamic bus: paired half-level rows sum to the bus voltage") {
  Gen g(5);
  const PwmConfig cfg;
  for (int c = 0; c < kCases; ++c) {
    CapacitorBank caps = balanced_bank(cfg.V_dc, CapacitorMode::dynamic);
    caps.v_c1 = g.uniform(30.0, 70.0);
    caps.v_c2 = g.uniform(30.0, 70.0);
    const auto out = [&](InverterState st) {
      SwitchState s;
      s.gates = gates_of(st);
      return inverter_output(s, caps, cfg);
    };
    const double bus = caps.v_c1 + caps.v_c2;
    REQUIRE(out(InverterState::k3a) + out(InverterState::k3b) == doctest::Approx(bus));
    REQUIRE(out(InverterState::k1a) + out(InverterState::k1b) == doctest::Approx(-bus));
    REQUIRE(out(InverterState::k4) == doctest::Approx(bus));
    REQUIRE(out(InverterState::k2) == 0.0);
  }
}

TEST_CASE("controller algebra") {
  Gen g(6);
  const PlantParams p = reference_plant();
  Gains gains;
  for (int c = 0; c < kCases; ++c) {
    gains.alpha = g.uniform(1.0, 50.0);
    const double t = g.uniform(0.0, 10.0);
    const TrajectorySample traj = desired_trajectory(t);
    const double q = g.uniform(-3.0, 3.0), q_dot = g.uniform(-10.0, 10.0);
    const TrackingErrors te = tracking_errors(q, q_dot, traj, gains);
    REQUIRE(te.r == doctest::Approx(te.e_dot + gains.alpha * te.e));

    const Vec3 W = regression_w_tau(traj, te.e_dot, q, q_dot, gains);
    const double lhs = W[0] * p.M + W[1] * p.B + W[2] * p.N;
    const double rhs = p.M * (traj.q_d_ddot + gains.alpha * te.e_dot) + p.B * q_dot +
                       p.N * std::sin(q);
    REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-12));

    const Vec3 est{g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)};
    const Vec3 next = update_theta_tau(est, W, te.r, gains, 1e-4);
    for (std::size_t i = 0; i < 3; ++i) {
      const double step = next[i] - est[i];
      if (W[i] * te.r != 0.0 && step != 0.0) REQUIRE(std::signbit(step) == std::signbit(W[i] * te.r));
    }

    Vec6 th1{};
    for (double& v : th1) v = g.uniform(-2, 2);
    const Vec6 W1 = regression_w1(q, q_dot, g.uniform(-5, 5), est, traj, te.e, te.e_dot, te.r, W, gains);
    const double eta_I = g.uniform(-3, 3);
    const double a = g.uniform(-4, 4);
    Vec6 scaled{};
    for (std::size_t i = 0; i < 6; ++i) scaled[i] = a * th1[i];
    double wt = 0.0;
    for (std::size_t i = 0; i < 6; ++i) wt += W1[i] * th1[i];
    const double V0 = control_voltage(W1, {}, eta_I, te.r, gains);
    REQUIRE(control_voltage(W1, scaled, eta_I, te.r, gains) - V0 ==
            doctest::Approx(a * wt).epsilon(1e-9).scale(std::abs(V0) + 1.0));
  }
}

TEST_CASE("unforced plant without gravity never gains energy") {
  Gen g(7);
  PlantParams p = reference_plant();
  p.N = 0.0;
  for (int c = 0; c < 100; ++c) {
    MotorState s{g.uniform(-3, 3), g.uniform(-20, 20), g.uniform(-10, 10), 0.0};
    const auto energy = [&](const MotorState& x) {
      return 0.5 * p.L * x.I * x.I + 0.5 * p.M * p.K_B * x.q_dot * x.q_dot;
    };
    for (int i = 0; i < 50; ++i) {
      const MotorState n = integrate_plant(s, 0.0, 1e-5, p);
      REQUIRE(energy(n) <= energy(s) * (1.0 + 1e-14) + 1e-15);
      s = n;
    }
  }
}

TEST_CASE("CSV round trip for arbitrary finite values") {
  Gen g(8);
  Trace trace(200);
  for (TraceRecord& r : trace) {
    for (double* f : {&r.t, &r.q, &r.q_d, &r.q_d_dot, &r.e, &r.e_dot, &r.r, &r.q_dot, &r.I,
                      &r.I_d, &r.eta_I, &r.V_cmd, &r.V_applied, &r.v_c1, &r.v_c2}) {
      *f = g.any_finite();
    }
    r.level = g.integer(-1, 4);
    for (double& v : r.theta_tau_hat) v = g.any_finite();
    for (double& v : r.theta_1_hat) v = g.any_finite();
  }
  const Trace back = parse_csv(to_csv(trace));
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    REQUIRE(std::bit_cast<std::uint64_t>(back[i].q) == std::bit_cast<std::uint64_t>(trace[i].q));
    REQUIRE(back[i] == trace[i]);
  }
}

TEST_CASE("harmonic amplitudes of random mixtures") {
  Gen g(9);
  for (int c = 0; c < 50; ++c) {
    const std::size_t periods = static_cast<std::size_t>(g.integer(1, 4));
    const std::size_t per = 128;
    std::array<double, 6> amp{};
    std::array<double, 6> phase{};
    for (std::size_t h = 1; h < amp.size(); ++h) {
      amp[h] = g.uniform(0.0, 2.0);
      phase[h] = g.uniform(0.0, 6.28);
    }
    std::vector<double> v(periods * per);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double w = 2.0 * 3.14159265358979323846 * static_cast<double>(k) / per;
      for (std::size_t h = 1; h < amp.size(); ++h) v[k] += amp[h] * std::cos(h * w + phase[h]);
    }
    const auto a = harmonic_amplitudes(v, periods);
    double harm = 0.0;
    for (std::size_t h = 1; h < amp.size(); ++h) {
      REQUIRE(a[h] == doctest::Approx(amp[h]).epsilon(1e-9).scale(1.0));
      if (h >= 2) harm += amp[h] * amp[h];
    }
    const auto thd = total_harmonic_distortion(v, periods);
    REQUIRE(thd);
    REQUIRE(*thd == doctest::Approx(std::sqrt(harm) / amp[1]).epsilon(1e-8));
  }
}
