#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mzi/error.hpp"

namespace mzi {

inline constexpr double kQuadratureTol = 1e-13;

/// Adaptive 31-point Gauss-Kronrod over [lo, hi], split at the interior
/// breakpoints so narrow peaks far apart are not skipped.
template <class F>
double integrate(F&& f, double lo, double hi, std::span<const double> breakpoints = {},
                 double tol = kQuadratureTol) {
  detail::require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, Errc::invalid_argument,
                  "integration bounds must satisfy lo < hi");
  std::vector<double> knots{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi) knots.push_back(b);
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i)
    total += gauss_kronrod<double, 31>::integrate(f, knots[i - 1], knots[i], 20, tol);
  return total;
}

}  // namespace mzi
