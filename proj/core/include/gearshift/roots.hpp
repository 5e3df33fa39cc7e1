#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace gearshift {

/// Bisection on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("bisect: root is not bracketed");
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Scans [lo, hi] in `segments` equal pieces for the first sign change and
/// refines it by bisection. Empty when no sign change is found.
template <typename F>
std::optional<double> first_root(F&& f, double lo, double hi, int segments = 2000, double tol = 1e-12) {
  double a = lo;
  double fa = f(a);
  if (fa == 0.0) return a;
  const double step = (hi - lo) / segments;
  for (int k = 1; k <= segments; ++k) {
    const double b = lo + k * step;
    const double fb = f(b);
    if (fb == 0.0) return b;
    if ((fa > 0.0) != (fb > 0.0)) return bisect(f, a, b, tol);
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

}  // namespace gearshift
