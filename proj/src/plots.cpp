#include "drivesim/plots.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <system_error>

namespace drivesim {

namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e"};

void require(const Trace& trace) {
  if (trace.empty()) throw std::invalid_argument("cannot plot an empty trace");
}

template <class Get>
Series column(const Trace& trace, std::string label, Get get) {
  Series s;
  s.label = std::move(label);
  s.x.reserve(trace.size());
  s.y.reserve(trace.size());
  for (const TraceRecord& r : trace) {
    s.x.push_back(r.t);
    s.y.push_back(get(r));
  }
  return s;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad(double frac) {
    if (!(hi > lo)) {
      const double w = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
      lo -= w;
      hi += w;
      return;
    }
    const double w = (hi - lo) * frac;
    lo -= w;
    hi += w;
  }
};

}  // namespace

Figure position_figure(const Trace& trace) {
  require(trace);
  return {"position", "Position tracking", "t [s]", "angle [rad]",
          {column(trace, "q", [](const TraceRecord& r) { return r.q; }),
           column(trace, "q_d", [](const TraceRecord& r) { return r.q_d; })}};
}

Figure error_figure(const Trace& trace) {
  require(trace);
  return {"tracking_error", "Position error", "t [s]", "e [rad]",
          {column(trace, "e", [](const TraceRecord& r) { return r.e; })}};
}

Figure current_error_figure(const Trace& trace) {
  require(trace);
  return {"current_error", "Current tracking error", "t [s]", "eta_I [A]",
          {column(trace, "eta_I", [](const TraceRecord& r) { return r.eta_I; })}};
}

Figure current_figure(const Trace& trace) {
  require(trace);
  return {"current", "Armature current", "t [s]", "current [A]",
          {column(trace, "I", [](const TraceRecord& r) { return r.I; }),
           column(trace, "I_d", [](const TraceRecord& r) { return r.I_d; })}};
}

Figure error_overlay_figure(const Trace& a, const Trace& b,
                            const std::string& label_a,
                            const std::string& label_b) {
  require(a);
  require(b);
  if (a.size() != b.size()) {
    throw std::invalid_argument("overlay traces have different lengths");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].t != b[k].t) {
      throw std::invalid_argument("overlay traces have different time bases");
    }
  }
  return {"error_overlay", "Position error comparison", "t [s]", "e [rad]",
          {column(a, label_a, [](const TraceRecord& r) { return r.e; }),
           column(b, label_b, [](const TraceRecord& r) { return r.e; })}};
}

Figure pwm_figure(const PwmWaveform& wave, const std::string& title) {
  if (wave.t.empty()) throw std::invalid_argument("cannot plot an empty waveform");
  Series s{"v_out", wave.t, wave.v, true};
  return {"pwm_output", title, "t [s]", "voltage [V]", {std::move(s)}};
}

Series reduce(const Series& s, std::size_t max_points) {
  if (s.x.size() != s.y.size()) {
    throw std::invalid_argument("series '" + s.label + "' has mismatched x/y");
  }
  Series out{s.label, {}, {}, s.step};
  const std::size_t n = s.x.size();
  if (n == 0) return out;
  if (s.step) {
    out.x.push_back(s.x[0]);
    out.y.push_back(s.y[0]);
    for (std::size_t i = 1; i < n; ++i) {
      if (s.y[i] != s.y[i - 1]) {
        out.x.push_back(s.x[i]);
        out.y.push_back(s.y[i - 1]);
        out.x.push_back(s.x[i]);
        out.y.push_back(s.y[i]);
      }
    }
    out.x.push_back(s.x[n - 1]);
    out.y.push_back(s.y[n - 1]);
    return out;
  }
  if (max_points < 2 || n <= max_points) return s;
  const std::size_t buckets = max_points / 2;
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t lo = b * n / buckets;
    const std::size_t hi = (b + 1) * n / buckets;
    if (lo == hi) continue;
    std::size_t imin = lo;
    std::size_t imax = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      if (s.y[i] < s.y[imin]) imin = i;
      if (s.y[i] > s.y[imax]) imax = i;
    }
    const std::size_t first = std::min(imin, imax);
    const std::size_t second = std::max(imin, imax);
    out.x.push_back(s.x[first]);
    out.y.push_back(s.y[first]);
    if (second != first) {
      out.x.push_back(s.x[second]);
      out.y.push_back(s.y[second]);
    }
  }
  return out;
}

std::string render_svg(const Figure& fig, std::size_t max_points) {
  if (fig.series.empty()) throw std::invalid_argument("figure has no series");
  std::vector<Series> drawn;
  Range xr;
  Range yr;
  for (const Series& s : fig.series) {
    drawn.push_back(reduce(s, max_points));
    for (double v : drawn.back().x) xr.add(v);
    for (double v : drawn.back().y) yr.add(v);
  }
  if (drawn.front().x.empty()) throw std::invalid_argument("figure has no data");
  xr.pad(0.0);
  yr.pad(0.05);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kWidth) +
         "\" height=\"" + fmt("%.0f", kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt("%.1f", kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(fig.title) + "</text>\n";
  svg += "<rect x=\"" + fmt("%.1f", kLeft) + "\" y=\"" + fmt("%.1f", kTop) + "\" width=\"" +
         fmt("%.1f", pw) + "\" height=\"" + fmt("%.1f", ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    svg += "<line x1=\"" + fmt("%.2f", px(fx)) + "\" y1=\"" + fmt("%.2f", kTop) + "\" x2=\"" +
           fmt("%.2f", px(fx)) + "\" y2=\"" + fmt("%.2f", kTop + ph) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", px(fx)) + "\" y=\"" + fmt("%.2f", kTop + ph + 16) +
           "\" text-anchor=\"middle\">" + fmt("%.4g", fx) + "</text>\n";
    svg += "<line x1=\"" + fmt("%.2f", kLeft) + "\" y1=\"" + fmt("%.2f", py(fy)) + "\" x2=\"" +
           fmt("%.2f", kLeft + pw) + "\" y2=\"" + fmt("%.2f", py(fy)) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", kLeft - 6) + "\" y=\"" + fmt("%.2f", py(fy) + 4) +
           "\" text-anchor=\"end\">" + fmt("%.4g", fy) + "</text>\n";
  }
  svg += "<text x=\"" + fmt("%.1f", kLeft + pw / 2) + "\" y=\"" + fmt("%.1f", kHeight - 12) +
         "\" text-anchor=\"middle\">" + escape(fig.x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + fmt("%.1f", kTop + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(fig.y_label) + "</text>\n";

  for (std::size_t k = 0; k < drawn.size(); ++k) {
    const Series& s = drawn[k];
    const char* color = kColors[k % std::size(kColors)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) svg += ' ';
      svg += fmt("%.2f", px(s.x[i])) + "," + fmt("%.2f", py(s.y[i]));
    }
    svg += "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    svg += "<line x1=\"" + fmt("%.1f", kLeft + pw + 12) + "\" y1=\"" + fmt("%.1f", ly) +
           "\" x2=\"" + fmt("%.1f", kLeft + pw + 36) + "\" y2=\"" + fmt("%.1f", ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", kLeft + pw + 42) + "\" y=\"" + fmt("%.1f", ly + 4) +
           "\">" + escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::filesystem::path write_svg(const Figure& fig,
                                const std::filesystem::path& dir) {
  const std::string body = render_svg(fig);
  const auto path = dir / (fig.name + ".svg");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "cannot open " + path.string());
  }
  out << body;
  if (!out.flush()) {
    throw std::system_error(errno, std::generic_category(),
                            "write failed for " + path.string());
  }
  return path;
}

std::vector<std::filesystem::path> emit_plots(const Trace& trace,
                                              const std::filesystem::path& dir) {
  require(trace);
  std::vector<Figure> figs{position_figure(trace), error_figure(trace),
                           current_error_figure(trace), current_figure(trace)};
  std::vector<std::filesystem::path> paths;
  for (const Figure& f : figs) paths.push_back(write_svg(f, dir));
  return paths;
}

PwmWaveform pwm_demo_waveform(const PwmConfig& cfg) {
  return open_loop_waveform(cfg, 0.9, 60.0, 2, 20000);
}

}  // namespace drivesim
