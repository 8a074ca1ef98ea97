#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "mzi/error.hpp"

namespace mzi {

using complex = std::complex<double>;

inline constexpr double kConservationTol = 1e-12;
inline constexpr double kOrthonormalityTol = 1e-9;

/// The four path amplitudes of the interferometer: A1, A2 reach D1 through the
/// left and right arm, A3, A4 reach D2 through the left and right arm.
struct PathSet {
  complex a1{}, a2{}, a3{}, a4{};

  friend bool operator==(const PathSet&, const PathSet&) = default;
};

/// Both sides of the probability conservation rule, as residuals from 1.
struct ConservationResidual {
  double path_sum = 0.0;  // sum |A_i|^2 - 1
  double port_sum = 0.0;  // |A1 + A2|^2 + |A3 + A4|^2 - 1

  double worst() const noexcept { return std::max(std::abs(path_sum), std::abs(port_sum)); }
};

inline ConservationResidual conservation_residual(const PathSet& p) noexcept {
  return {std::norm(p.a1) + std::norm(p.a2) + std::norm(p.a3) + std::norm(p.a4) - 1.0,
          std::norm(p.a1 + p.a2) + std::norm(p.a3 + p.a4) - 1.0};
}

inline bool check_conservation(const PathSet& p) noexcept {
  return conservation_residual(p).worst() <= kConservationTol;
}

/// A1 A2* + A3 A4*. Zero for any set built from orthonormal post-selections,
/// which makes P(D1) + P(D2) independent of the packet width.
inline complex port_cross_term(const PathSet& p) noexcept {
  return p.a1 * std::conj(p.a2) + p.a3 * std::conj(p.a4);
}

/// Two-level state in the fixed basis {|b1>, |b2>}.
struct QubitState {
  complex c1{}, c2{};

  double norm() const noexcept { return std::norm(c1) + std::norm(c2); }

  /// Normalised copy with <b1|state> rotated onto the non-negative real axis
  /// (the c1 == 0 case rotates c2 instead).
  static QubitState normalized(complex c1, complex c2) {
    const double n = std::sqrt(std::norm(c1) + std::norm(c2));
    detail::require(std::isfinite(n) && n > 0.0, Errc::invalid_argument,
                    "qubit state must have a finite non-zero norm");
    const complex lead = std::abs(c1) > 0.0 ? c1 : c2;
    const complex phase = std::conj(lead) / std::abs(lead);
    return {c1 * phase / n, c2 * phase / n};
  }

  friend bool operator==(const QubitState&, const QubitState&) = default;
};

inline complex inner(const QubitState& bra, const QubitState& ket) noexcept {
  return std::conj(bra.c1) * ket.c1 + std::conj(bra.c2) * ket.c2;
}

/// Pointer shift y (y = -v tau for the interferometer) and the requested
/// asymptotic peak position z.
struct DesignTarget {
  double y = -1.0;
  double z = 0.0;
};

namespace detail {

inline void validate_target(const DesignTarget& t) {
  require(std::isfinite(t.y) && std::isfinite(t.z), Errc::invalid_argument,
          "design target must be finite");
  require(t.y != 0.0, Errc::singular_target, "pointer shift y must be non-zero");
  require(std::abs(t.z - t.y) >= 1e-9 * std::max(std::abs(t.y), 1.0), Errc::singular_target,
          "target z coincides with y (z/(y-z) diverges)");
}

inline double design_ratio(const DesignTarget& t) { return t.z / (t.y - t.z); }

}  // namespace detail

/// Real amplitudes for the symmetric pre-selection (|b1> + |b2>)/sqrt(2):
/// A2/A1 = z/(y - z), A3 = A2, A4 = -A1.
inline PathSet design_symmetric(const DesignTarget& target) {
  detail::validate_target(target);
  const double k = detail::design_ratio(target);
  const double a1 = 1.0 / std::sqrt(2.0 * (1.0 + k * k));
  const double a2 = k * a1;
  return {a1, a2, a2, -a1};
}

struct PostSelection {
  QubitState d1, d2;
};

/// Post-selected states that put the D1 peak at z for pre-selection |I>.
///
/// D1 follows the real-amplitude choice <b1|D1> = 1/(N <b1|I>*),
/// <b2|D1> = k/(N <b2|I>*), k = z/(y - z). D2 is the orthogonal complement
/// (<b2|D1>*, -<b1|D1>*) multiplied by the phase of <b1|I><b2|I>, so A3 and A4
/// come out real as well. For a real |I> the phase is +1 or -1.
inline PostSelection design_states(const QubitState& pre, const DesignTarget& target) {
  detail::require(std::abs(pre.norm() - 1.0) <= kOrthonormalityTol, Errc::invalid_argument,
                  "pre-selected state must be normalised");
  detail::require(std::abs(pre.c1) > 0.0 && std::abs(pre.c2) > 0.0,
                  Errc::degenerate_preselection,
                  "pre-selected state needs both components non-zero");
  detail::validate_target(target);

  const double k = detail::design_ratio(target);
  const double n = std::sqrt(1.0 / std::norm(pre.c1) + k * k / std::norm(pre.c2));
  const complex d11 = 1.0 / (n * std::conj(pre.c1));
  const complex d12 = k / (n * std::conj(pre.c2));

  const complex prod = pre.c1 * pre.c2;
  const complex phase = prod / std::abs(prod);
  return {{d11, d12}, {phase * std::conj(d12), -phase * std::conj(d11)}};
}

/// A_i = <D|b><b|I> for the four (post-selection, basis) combinations.
inline PathSet amplitudes_from_states(const QubitState& pre, const QubitState& d1,
                                      const QubitState& d2) {
  const bool orthonormal = std::abs(d1.norm() - 1.0) <= kOrthonormalityTol &&
                           std::abs(d2.norm() - 1.0) <= kOrthonormalityTol &&
                           std::abs(inner(d1, d2)) <= kOrthonormalityTol;
  detail::require(orthonormal, Errc::invalid_postselection,
                  "post-selected states must be orthonormal");
  return {std::conj(d1.c1) * pre.c1, std::conj(d1.c2) * pre.c2,
          std::conj(d2.c1) * pre.c1, std::conj(d2.c2) * pre.c2};
}

/// A2/A1 that advances the D1 peak by xbar > 0 for a right-arm shift v tau.
/// Always in (-1, 0): advancement needs destructive interference.
inline double ratio_for_advancement(double xbar, double vtau) {
  detail::require(std::isfinite(xbar) && xbar > 0.0, Errc::invalid_argument,
                  "advancement must be > 0");
  detail::require(std::isfinite(vtau) && vtau > 0.0, Errc::invalid_argument, "v tau must be > 0");
  return -xbar / (xbar + vtau);
}

/// A2/A1 that delays the D1 peak by |xbar|. Positive while |xbar| < v tau,
/// negative beyond.
inline double ratio_for_delay(double abs_xbar, double vtau) {
  detail::require(std::isfinite(abs_xbar) && abs_xbar > 0.0, Errc::invalid_argument,
                  "delay magnitude must be > 0");
  detail::require(std::isfinite(vtau) && vtau > 0.0, Errc::invalid_argument, "v tau must be > 0");
  detail::require(abs_xbar != vtau, Errc::pole,
                  "a delay of exactly v tau requires A1 = 0 (ratio diverges)");
  return -abs_xbar / (abs_xbar - vtau);
}

}  // namespace mzi
