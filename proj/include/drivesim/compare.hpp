#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drivesim/sim_engine.hpp"

namespace drivesim {

/// Pointwise difference b - a of one trace column.
struct SignalDelta {
  std::string signal;
  double max_abs_delta = 0.0;
  double rms_delta = 0.0;
  double rms_a = 0.0;
  double rms_b = 0.0;
  std::optional<double> rms_ratio;  ///< rms_b / rms_a, absent when rms_a == 0
};

struct ComparisonReport {
  std::string name_a;
  std::string name_b;
  std::vector<SignalDelta> signals;
  std::uint64_t saturation_a = 0;
  std::uint64_t saturation_b = 0;
  double rms_e_final_a = 0.0;  ///< final 20 % of the run
  double rms_e_final_b = 0.0;
  std::optional<double> rms_e_final_ratio;
  /// rms_e_final_b <= kParityBound * rms_e_final_a
  bool parity = false;
};

inline constexpr double kParityBound = 2.0;

/// Throws std::invalid_argument unless both traces are non-empty and sampled
/// at identical times.
ComparisonReport compare(const Trace& a, const Trace& b,
                         const std::string& name_a = "a",
                         const std::string& name_b = "b",
                         std::uint64_t saturation_a = 0,
                         std::uint64_t saturation_b = 0);

ComparisonReport compare(const RunResult& a, const RunResult& b);

std::string to_json(const ComparisonReport& rep);
std::string to_text(const ComparisonReport& rep);

}  // namespace drivesim
