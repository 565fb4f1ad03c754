#include "drivesim/harmonics.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace drivesim {

namespace {

// FFTW planning is not thread-safe; execution on a private plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct PlanDestroy {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

std::vector<double> harmonic_amplitudes(std::span<const double> samples,
                                        std::size_t n_periods) {
  const std::size_t n = samples.size();
  if (n == 0 || n_periods == 0) {
    throw std::invalid_argument("harmonic analysis needs samples and periods");
  }
  std::unique_ptr<double, FftwFree> in(
      static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(
      fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  std::unique_ptr<fftw_plan_s, PlanDestroy> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(),
                                    FFTW_ESTIMATE));
  }
  std::copy(samples.begin(), samples.end(), in.get());
  fftw_execute(plan.get());

  std::vector<double> amps;
  for (std::size_t bin = 0; bin <= n / 2; bin += n_periods) {
    const std::complex<double> c(out.get()[bin][0], out.get()[bin][1]);
    double scale = 2.0 / static_cast<double>(n);
    if (bin == 0 || 2 * bin == n) scale = 1.0 / static_cast<double>(n);
    amps.push_back(std::abs(c) * scale);
  }
  return amps;
}

std::optional<double> total_harmonic_distortion(std::span<const double> samples,
                                                std::size_t n_periods) {
  if (n_periods == 0 || samples.size() < 4 * n_periods) return std::nullopt;
  const auto amps = harmonic_amplitudes(samples, n_periods);
  if (amps.size() < 3 || amps[1] == 0.0) return std::nullopt;
  double sum = 0.0;
  for (std::size_t h = 2; h < amps.size(); ++h) sum += amps[h] * amps[h];
  return std::sqrt(sum) / amps[1];
}

}  // namespace drivesim
