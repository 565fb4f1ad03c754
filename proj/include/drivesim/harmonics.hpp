#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace drivesim {

/// Amplitudes |c_h| of the harmonics h = 0, 1, 2, ... of a record that spans
/// exactly n_periods fundamental periods. Index h of the result is the h-th
/// harmonic; entries stop at the Nyquist limit. c_0 is the mean.
std::vector<double> harmonic_amplitudes(std::span<const double> samples,
                                        std::size_t n_periods);

/// THD = sqrt(sum_{h>=2} |c_h|^2) / |c_1| over a record of exactly n_periods
/// fundamental periods. Absent when the record is too short to resolve the
/// second harmonic or the fundamental vanishes.
std::optional<double> total_harmonic_distortion(std::span<const double> samples,
                                                std::size_t n_periods);

}  // namespace drivesim
