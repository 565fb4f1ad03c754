#pragma once

#include <array>
#include <cstddef>

namespace drivesim {

/// One classical fourth-order Runge-Kutta step of x' = f(t, x).
template <std::size_t N, typename F>
std::array<double, N> rk4_step(F&& f, double t, const std::array<double, N>& x,
                               double h) {
  auto axpy = [](const std::array<double, N>& y, double a,
                 const std::array<double, N>& k) {
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + a * k[i];
    return out;
  };
  const auto k1 = f(t, x);
  const auto k2 = f(t + 0.5 * h, axpy(x, 0.5 * h, k1));
  const auto k3 = f(t + 0.5 * h, axpy(x, 0.5 * h, k2));
  const auto k4 = f(t + h, axpy(x, h, k3));
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace drivesim
