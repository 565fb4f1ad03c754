#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "drivesim/inverter_pwm.hpp"
#include "drivesim/sim_engine.hpp"

namespace drivesim {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool step = false;  ///< piecewise constant, drawn as a staircase
};

struct Figure {
  std::string name;  ///< file stem
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

// Figure builders. All throw std::invalid_argument on an empty trace.
Figure position_figure(const Trace& trace);      // q and q_d
Figure error_figure(const Trace& trace);         // e
Figure current_error_figure(const Trace& trace); // eta_I
Figure current_figure(const Trace& trace);       // I and I_d

/// e(t) of two runs on one axis. Throws std::invalid_argument unless both
/// traces have the same sample times.
Figure error_overlay_figure(const Trace& a, const Trace& b,
                            const std::string& label_a,
                            const std::string& label_b);

/// Output voltage of an open-loop waveform as a staircase.
Figure pwm_figure(const PwmWaveform& wave, const std::string& title);

/// The points actually drawn for a series. Smooth series longer than
/// max_points keep the min and max of each of max_points / 2 buckets;
/// staircases keep only the corners.
Series reduce(const Series& s, std::size_t max_points);

/// Standalone SVG of the reduced series.
std::string render_svg(const Figure& fig, std::size_t max_points = 4000);

/// Writes <dir>/<fig.name>.svg and returns the path.
std::filesystem::path write_svg(const Figure& fig,
                                const std::filesystem::path& dir);

/// Position, error, current-error and current figures of one run.
std::vector<std::filesystem::path> emit_plots(const Trace& trace,
                                              const std::filesystem::path& dir);

/// The five-level output over two periods of a 60 Hz, 0.9-modulation
/// reference.
PwmWaveform pwm_demo_waveform(const PwmConfig& cfg);

}  // namespace drivesim
