#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "drivesim/harmonics.hpp"
#include "drivesim/inverter_pwm.hpp"
#include "drivesim/motor_dynamics.hpp"

using namespace drivesim;

namespace {

struct Row {
  InverterState state;
  bool s1, s2, s5, s6;
};

// Leg-pair switching table.
constexpr Row kTable[] = {
    {InverterState::k0, 0, 0, 1, 1},  {InverterState::k1a, 0, 1, 1, 1},
    {InverterState::k1b, 0, 0, 0, 1}, {InverterState::k2, 0, 1, 0, 1},
    {InverterState::k3a, 0, 1, 0, 0}, {InverterState::k3b, 1, 1, 0, 1},
    {InverterState::k4, 1, 1, 0, 0},
};

std::array<bool, 4> upper(const std::array<bool, 8>& g) { return {g[0], g[1], g[4], g[5]}; }

bool complementary(const std::array<bool, 8>& g) {
  return g[0] != g[2] && g[1] != g[3] && g[4] != g[6] && g[5] != g[7];
}

double mean_output(double u, const PwmConfig& cfg, int samples, bool five_level) {
  const CapacitorBank caps = balanced_bank(cfg.V_dc, CapacitorMode::stiff);
  double acc = 0.0;
  SwitchState sw;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) / (samples * cfg.f_c);
    if (five_level) {
      sw = select_switch_state(pwm_level(u, carriers_at(t, cfg)), sw);
      acc += inverter_output(sw, caps, cfg);
    } else {
      acc += hbridge_output(u, t, cfg);
    }
  }
  return acc / samples;
}

}  // namespace

TEST_CASE("carriers") {
  const PwmConfig cfg;
  const auto c0 = carriers_at(0.0, cfg);
  REQUIRE(c0.size() == 4);
  CHECK(c0 == std::vector<double>{-1.0, -0.5, 0.0, 0.5});
  const auto ch = carriers_at(1.0 / (2.0 * cfg.f_c), cfg);
  for (std::size_t k = 0; k < 4; ++k) CHECK(ch[k] == doctest::Approx(-0.5 + 0.5 * k));
  for (int i = 0; i < 997; ++i) {
    const auto c = carriers_at(i * 1.37e-6, cfg);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(c[k] >= -1.0 + 0.5 * k - 1e-12);
      CHECK(c[k] <= -0.5 + 0.5 * k + 1e-12);
    }
  }
  PwmConfig three = cfg;
  three.n_levels = 3;
  CHECK(carriers_at(0.0, three).size() == 2);
}

TEST_CASE("level from reference") {
  const PwmConfig cfg;
  for (double t : {3.3e-5, 1e-4, 1.77e-4}) {
    CHECK(pwm_level(1.0, carriers_at(t, cfg)) == 4);
    CHECK(pwm_level(-1.0, carriers_at(t, cfg)) == 0);
    CHECK(pwm_level(5.0, carriers_at(t, cfg)) == 4);
  }
  // Ties count as above: at the carrier minimum the lowest carrier equals -1.
  CHECK(pwm_level(-1.0, carriers_at(0.0, cfg)) == 1);
  CHECK(pwm_level(1.0, carriers_at(0.0, cfg)) == 4);
  SUBCASE("zero reference over one carrier period") {
    const int n = 10000;
    int prev = pwm_level(0.0, carriers_at(0.0, cfg));
    std::set<int> seen;
    for (int k = 0; k <= n; ++k) {
      const int level = pwm_level(0.0, carriers_at(k / (n * cfg.f_c), cfg));
      seen.insert(level);
      CHECK(std::abs(level - 2) <= 1);
      CHECK(std::abs(level - prev) <= 1);
      prev = level;
    }
    CHECK(seen.count(2) == 1);
  }
  SUBCASE("printed comparison polarity inverts the ordering") {
    const auto c = carriers_at(2.2e-5, cfg);
    CHECK(pwm_level(1.0, c, true) == 0);
    CHECK(pwm_level(-1.0, c, true) == 4);
  }
}

TEST_CASE("switching table") {
  for (const Row& row : kTable) {
    CAPTURE(to_string(row.state));
    const auto g = gates_of(row.state);
    CHECK(upper(g) == std::array<bool, 4>{row.s1, row.s2, row.s5, row.s6});
    CHECK(complementary(g));
    SwitchState s;
    s.gates = g;
    CHECK(classify(s) == row.state);
  }
  SwitchState broken;
  broken.gates[2] = broken.gates[0];
  CHECK_THROWS_AS(classify(broken), std::logic_error);
  SwitchState unknown;  // valid pairs, S1 on with S2 off is not a row
  unknown.gates = {true, false, false, true, false, true, true, false};
  CHECK_THROWS_AS(classify(unknown), std::logic_error);
}

TEST_CASE("switch state selection") {
  SwitchState s;
  s = select_switch_state(4, s);
  CHECK(upper(s.gates) == std::array<bool, 4>{1, 1, 0, 0});
  CHECK(select_switch_state(2, s).gates == gates_of(InverterState::k2));

  SwitchState fresh;
  const SwitchState first = select_switch_state(1, fresh);
  CHECK(upper(first.gates) == std::array<bool, 4>{0, 1, 1, 1});
  const SwitchState second = select_switch_state(1, first);
  CHECK(upper(second.gates) == std::array<bool, 4>{0, 0, 0, 1});
  CHECK(classify(select_switch_state(1, second)) == InverterState::k1a);

  const SwitchState up1 = select_switch_state(3, fresh);
  CHECK(classify(up1) == InverterState::k3a);
  CHECK(classify(select_switch_state(3, up1)) == InverterState::k3b);
  // The two half-levels keep independent toggles.
  CHECK(classify(select_switch_state(1, up1)) == InverterState::k1a);

  CHECK_THROWS_AS(select_switch_state(5, fresh), std::out_of_range);
  CHECK_THROWS_AS(select_switch_state(-1, fresh), std::out_of_range);
}

TEST_CASE("leg-pair output") {
  const PwmConfig cfg;
  const CapacitorBank stiff = balanced_bank(cfg.V_dc, CapacitorMode::stiff);
  const auto out = [&](InverterState st, const CapacitorBank& caps) {
    SwitchState s;
    s.gates = gates_of(st);
    return inverter_output(s, caps, cfg);
  };
  CHECK(out(InverterState::k0, stiff) == -100.0);
  CHECK(out(InverterState::k1a, stiff) == -50.0);
  CHECK(out(InverterState::k1b, stiff) == -50.0);
  CHECK(out(InverterState::k2, stiff) == 0.0);
  CHECK(out(InverterState::k3a, stiff) == 50.0);
  CHECK(out(InverterState::k4, stiff) == 100.0);

  CapacitorBank dyn = balanced_bank(cfg.V_dc, CapacitorMode::dynamic);
  dyn.v_c1 = 52.0;
  dyn.v_c2 = 48.0;
  const double a = out(InverterState::k3a, dyn);
  const double b = out(InverterState::k3b, dyn);
  CHECK(a != b);
  CHECK(a + b == doctest::Approx(cfg.V_dc));
  CHECK(out(InverterState::k1a, dyn) + out(InverterState::k1b, dyn) == doctest::Approx(-cfg.V_dc));
  CHECK(out(InverterState::k4, dyn) == doctest::Approx(100.0));

  SwitchState broken;
  broken.gates[1] = broken.gates[3];
  CHECK_THROWS_AS(inverter_output(broken, stiff, cfg), std::logic_error);
}

TEST_CASE("capacitor dynamics") {
  const PwmConfig cfg;
  CapacitorBank caps = balanced_bank(cfg.V_dc, CapacitorMode::dynamic);
  const auto with = [](InverterState st) {
    SwitchState s;
    s.gates = gates_of(st);
    return s;
  };
  SUBCASE("no load current") {
    for (const Row& row : kTable) {
      const CapacitorBank next = cap_update(caps, with(row.state), 0.0, 1e-5, cfg);
      CHECK(next.v_c1 == caps.v_c1);
      CHECK(next.v_c2 == caps.v_c2);
    }
  }
  SUBCASE("full levels discharge both capacitors equally") {
    caps.v_c1 = 51.0;
    caps.v_c2 = 47.0;
    for (auto st : {InverterState::k0, InverterState::k4}) {
      const CapacitorBank next = cap_update(caps, with(st), 3.0, 1e-5, cfg);
      CHECK(next.v_c1 - next.v_c2 == doctest::Approx(caps.v_c1 - caps.v_c2));
      CHECK(next.v_c1 != caps.v_c1);
    }
  }
  SUBCASE("stiff bank never moves") {
    const CapacitorBank stiff = balanced_bank(cfg.V_dc, CapacitorMode::stiff);
    CHECK(cap_update(stiff, with(InverterState::k1a), 10.0, 1e-3, cfg).v_c1 == stiff.v_c1);
  }
  SUBCASE("source regulates the sum") {
    caps.v_c1 = 45.0;
    caps.v_c2 = 45.0;
    for (int k = 0; k < 20000; ++k) caps = cap_update(caps, with(InverterState::k2), 0.0, 1e-5, cfg);
    CHECK(caps.v_c1 + caps.v_c2 == doctest::Approx(cfg.V_dc).epsilon(1e-3));
  }
  SUBCASE("alternating half-level rows keep the bus balanced") {
    // Each carrier period spends half its time at level 1 and half at level 2,
    // entering level 1 once per period.
    const double I_load = 5.0;
    const int per_period = 100;
    const double dt = 1.0 / (cfg.f_c * per_period);
    const auto drive = [&](bool alternate) {
      CapacitorBank bank = balanced_bank(cfg.V_dc, CapacitorMode::dynamic);
      SwitchState sw;
      std::vector<double> diff;
      for (int period = 0; period < 1000; ++period) {
        SwitchState low = select_switch_state(1, sw);
        if (!alternate) low.gates = gates_of(InverterState::k1a);
        sw = low;
        for (int k = 0; k < per_period / 2; ++k) bank = cap_update(bank, sw, I_load, dt, cfg);
        sw = select_switch_state(2, sw);
        for (int k = 0; k < per_period / 2; ++k) bank = cap_update(bank, sw, I_load, dt, cfg);
        diff.push_back(bank.v_c1 - bank.v_c2);
      }
      return diff;
    };
    const auto balanced = drive(true);
    double worst = 0.0;
    int sign_changes = 0;
    for (std::size_t i = 0; i < balanced.size(); ++i) {
      worst = std::max(worst, std::abs(balanced[i]));
      if (i > 1 && (balanced[i] - balanced[i - 1]) * (balanced[i - 1] - balanced[i - 2]) < 0) {
        ++sign_changes;
      }
    }
    CHECK(worst < 0.5);
    CHECK(sign_changes > 100);
    const auto one_sided = drive(false);
    CHECK(std::abs(one_sided.back()) > 10 * worst);
  }
}

TEST_CASE("three-level H-bridge") {
  const PwmConfig cfg;
  for (double t : {0.0, 3.1e-5, 1.4e-4}) CHECK(hbridge_output(1.0, t, cfg) == cfg.V_dc);
  for (double t : {3.1e-5, 1.4e-4}) CHECK(hbridge_output(-1.0, t, cfg) == -cfg.V_dc);
  // Away from the carrier minimum a zero reference sits strictly between the
  // two carriers.
  for (double t : {3.1e-5, 1.0e-4, 1.4e-4}) CHECK(hbridge_output(0.0, t, cfg) == 0.0);
  std::set<double> domain;
  for (int k = 0; k < 4000; ++k) {
    domain.insert(hbridge_output(0.8 * std::sin(k * 0.01), k * 1.3e-6, cfg));
  }
  CHECK(domain == std::set<double>{-100.0, 0.0, 100.0});

  const int samples = 1000;
  for (double u : {-0.83, -0.4, 0.0, 0.15, 0.5, 0.97}) {
    CAPTURE(u);
    CHECK(std::abs(mean_output(u, cfg, samples, false) - u * cfg.V_dc) <=
          cfg.V_dc / (2.0 * samples) + 1e-12);
  }
}

TEST_CASE("five-level volt-second fidelity") {
  const PwmConfig cfg;
  for (double u : {-0.9, -0.3, 0.0, 0.2, 0.61, 0.95}) {
    CAPTURE(u);
    CHECK(std::abs(mean_output(u, cfg, 1000, true) - u * cfg.V_dc) < 0.01 * cfg.V_dc);
  }
}

TEST_CASE("reference normalization") {
  CHECK(normalize_reference(0.0, 100.0).u == 0.0);
  CHECK(normalize_reference(100.0, 100.0).u == 1.0);
  CHECK_FALSE(normalize_reference(100.0, 100.0).saturated);
  const NormalizedReference sat = normalize_reference(200.0, 100.0);
  CHECK(sat.u == 1.0);
  CHECK(sat.saturated);
  CHECK(normalize_reference(-250.0, 100.0).u == -1.0);
  CHECK_THROWS_AS(normalize_reference(1.0, 0.0), ParameterError);
}

TEST_CASE("open-loop waveforms") {
  PwmConfig five;
  const PwmWaveform w5 = open_loop_waveform(five, 0.9, 60.0, 2, 20000);
  REQUIRE(w5.v.size() == 40000);
  const std::set<double> levels5(w5.v.begin(), w5.v.end());
  CHECK(levels5 == std::set<double>{-100.0, -50.0, 0.0, 50.0, 100.0});

  PwmConfig three = five;
  three.n_levels = 3;
  const PwmWaveform w3 = open_loop_waveform(three, 0.9, 60.0, 2, 20000);
  const std::set<double> levels3(w3.v.begin(), w3.v.end());
  CHECK(levels3 == std::set<double>{-100.0, 0.0, 100.0});

  const auto thd5 = total_harmonic_distortion(w5.v, 2);
  const auto thd3 = total_harmonic_distortion(w3.v, 2);
  REQUIRE(thd5);
  REQUIRE(thd3);
  CHECK(*thd5 < *thd3);

  PwmConfig four = five;
  four.n_levels = 4;
  CHECK_THROWS_AS(open_loop_waveform(four, 0.9, 60.0, 1, 100), ParameterError);
  CHECK_THROWS_AS(open_loop_waveform(five, 0.9, 0.0, 1, 100), ParameterError);
}

TEST_CASE("configuration validation") {
  PwmConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.V_dc = 0.0;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
  cfg = PwmConfig{};
  cfg.f_c = -1.0;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
  cfg = PwmConfig{};
  cfg.n_levels = 1;
  CHECK_THROWS_AS(validate(cfg), ParameterError);
}
