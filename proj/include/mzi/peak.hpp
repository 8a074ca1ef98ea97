#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "mzi/error.hpp"

namespace mzi {

/// Golden-section search for the maximum of a unimodal f on [a, b]; stops once
/// the bracket is narrower than `tol`.
template <class F>
double golden_section_maximize(F&& f, double a, double b, double tol) {
  constexpr double invphi = std::numbers::phi - 1.0;  // 1/phi
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct PeakOptions {
  std::size_t grid_points = 4096;
  double rel_tol = 1e-8;  // final bracket width relative to hi - lo
};

inline constexpr double kDarkThreshold = 1e-30;

/// Position of the global maximum of `density` on [lo, hi]: coarse grid
/// argmax, then golden-section refinement between the neighbouring nodes.
template <class F>
double find_peak(F&& density, double lo, double hi, const PeakOptions& opts = {}) {
  detail::require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, Errc::invalid_argument,
                  "peak bracket must satisfy lo < hi");
  detail::require(opts.grid_points >= 2048, Errc::invalid_argument,
                  "peak search needs at least 2048 grid points");
  const std::size_t n = opts.grid_points;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = density(lo + h * static_cast<double>(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  detail::require(best_value >= kDarkThreshold, Errc::dark_bracket,
                  "density vanishes throughout the bracket");
  const double a = best == 0 ? lo : lo + h * static_cast<double>(best - 1);
  const double b = best + 1 >= n ? hi : lo + h * static_cast<double>(best + 1);
  return golden_section_maximize(density, a, b, opts.rel_tol * (hi - lo));
}

}  // namespace mzi
