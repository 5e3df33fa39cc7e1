#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "gearshift/driveline.hpp"

namespace gearshift {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Classic fourth-order Runge-Kutta step for x' = f(t, x).
template <std::size_t N, typename F>
Vec<N> rk4_step(F&& f, double t, const Vec<N>& x, double h) {
  auto axpy = [](const Vec<N>& a, double s, const Vec<N>& b) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const Vec<N> k1 = f(t, x);
  const Vec<N> k2 = f(t + 0.5 * h, axpy(x, 0.5 * h, k1));
  const Vec<N> k3 = f(t + 0.5 * h, axpy(x, 0.5 * h, k2));
  const Vec<N> k4 = f(t + h, axpy(x, h, k3));
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

struct EventHit {
  double fraction = 1.0;  // of the attempted step, in (0, 1]
};

/// Locates the first sign change of the event function g(t, x) inside one RK4
/// step by bisection on the sub-step length. Returns nothing when g keeps the
/// sign it had at the start of the step. Throws when the bracket is lost.
template <std::size_t N, typename F, typename G>
std::optional<EventHit> locate_event(F&& f, G&& g, double t, const Vec<N>& x, double h, double time_tol = 1e-12) {
  const double g0 = g(t, x);
  const double g1 = g(t + h, rk4_step<N>(f, t, x, h));
  if (g0 == 0.0) return std::nullopt;
  if ((g0 > 0.0) == (g1 > 0.0) && g1 != 0.0) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  while ((hi - lo) * h > time_tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(t + mid * h, rk4_step<N>(f, t, x, mid * h));
    if (gm == 0.0) {
      hi = mid;
      break;
    }
    if ((gm > 0.0) == (g0 > 0.0)) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-16) break;
  }
  if (!(hi > 0.0)) throw std::runtime_error("locate_event: event located at the step start");
  return EventHit{hi};
}

/// One fixed step of the selected driveline model with inputs held constant.
DrivelineState integrate_step(const DrivelineModel& model, const DrivelineState& x, const DrivelineInputs& in,
                              double dt);

}  // namespace gearshift
