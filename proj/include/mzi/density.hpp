#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "mzi/amplitudes.hpp"
#include "mzi/error.hpp"
#include "mzi/wavepacket.hpp"

namespace mzi {

/// One detector port: amplitude a1 through the left arm, a2 through the right
/// arm where the packet is held back by `delay`.
struct TwoPathConfig {
  complex a1{1.0, 0.0};
  complex a2{};
  GaussianPacket packet{};
  double delay = 1.0;

  double shift() const noexcept { return packet.velocity * delay; }

  void validate() const {
    packet.validate();
    detail::require(std::isfinite(delay) && delay >= 0.0, Errc::invalid_argument,
                    "delay must be finite and >= 0");
    detail::require(std::isfinite(a1.real()) && std::isfinite(a1.imag()) &&
                        std::isfinite(a2.real()) && std::isfinite(a2.imag()),
                    Errc::invalid_argument, "amplitudes must be finite");
    detail::require(std::norm(a1) + std::norm(a2) <= 1.0 + kConservationTol,
                    Errc::invalid_amplitudes, "|A1|^2 + |A2|^2 exceeds 1");
  }
};

inline TwoPathConfig port_d1(const PathSet& p, const GaussianPacket& packet, double delay) {
  return {p.a1, p.a2, packet, delay};
}

/// D2 has the same structure with (A3, A4) in place of (A1, A2).
inline TwoPathConfig port_d2(const PathSet& p, const GaussianPacket& packet, double delay) {
  return {p.a3, p.a4, packet, delay};
}

/// Overlap integral of the two arm packets, exp(-(v tau)^2 / (2 w^2)).
inline double overlap(const TwoPathConfig& cfg) noexcept {
  const double s = cfg.shift() / cfg.packet.width;
  return std::exp(-0.5 * s * s);
}

inline double density_d1(double x, const TwoPathConfig& cfg) {
  const double g = eval_gaussian(x, cfg.packet);
  const double gs = eval_gaussian(x, shifted_copy(cfg.packet, cfg.delay));
  const double cross = (std::conj(cfg.a2) * cfg.a1).real();
  return std::max(0.0, std::norm(cfg.a1) * g * g + std::norm(cfg.a2) * gs * gs + 2.0 * cross * g * gs);
}

/// Unconditional probability of reaching the port.
inline double detection_probability(const TwoPathConfig& cfg) {
  const double cross = (std::conj(cfg.a2) * cfg.a1).real();
  const double p = std::norm(cfg.a1) + std::norm(cfg.a2) + 2.0 * cross * overlap(cfg);
  detail::require(p >= -kConservationTol && p <= 1.0 + kConservationTol, Errc::invalid_amplitudes,
                  "detection probability outside [0, 1]");
  return std::clamp(p, 0.0, 1.0);
}

inline constexpr double kMinimumNorm = 1e-15;

/// Conditional mean position at the port, int x P(x) dx / P.
inline double mean_position(const TwoPathConfig& cfg) {
  const double e = overlap(cfg);
  const double cross = (std::conj(cfg.a2) * cfg.a1).real();
  const double norm = std::norm(cfg.a1) + std::norm(cfg.a2) + 2.0 * cross * e;
  detail::require(norm > kMinimumNorm, Errc::vanishing_norm, "port is dark, mean undefined");
  return cfg.packet.center - cfg.shift() * (std::norm(cfg.a2) + cross * e) / norm;
}

/// Broad-packet limit of the peak (and mean) position, relative to the
/// left-arm packet: -Re[v tau A2 / (A1 + A2)].
inline double asymptotic_peak(complex a1, complex a2, double vtau) {
  const complex sum = a1 + a2;
  detail::require(std::abs(sum) > 0.0, Errc::dark_port, "A1 + A2 vanishes");
  return -(vtau * a2 / sum).real();
}

inline double asymptotic_peak(const TwoPathConfig& cfg) {
  return cfg.packet.center + asymptotic_peak(cfg.a1, cfg.a2, cfg.shift());
}

/// Single Gaussian of mass |A1 + A2|^2 centred at the asymptotic peak.
inline double asymptotic_density(double x, complex a1, complex a2, double vtau, double width) {
  const double xbar = asymptotic_peak(a1, a2, vtau);
  const double u = (x - xbar) / width;
  return std::norm(a1 + a2) / std::sqrt(std::numbers::pi * width * width / 2.0) *
         std::exp(-2.0 * u * u);
}

inline double asymptotic_density(double x, const TwoPathConfig& cfg) {
  return asymptotic_density(x - cfg.packet.center, cfg.a1, cfg.a2, cfg.shift(), cfg.packet.width);
}

struct SuperpositionTerm {
  complex amplitude{};
  double shift = 0.0;  // the copy is G(x + shift)
};

/// Coherent sum of spatially delayed copies of one packet.
struct SuperpositionSpec {
  std::vector<SuperpositionTerm> terms;
  GaussianPacket packet{};

  void validate() const {
    packet.validate();
    detail::require(!terms.empty(), Errc::invalid_argument, "superposition needs at least one term");
    for (const auto& t : terms)
      detail::require(std::isfinite(t.shift) && std::isfinite(t.amplitude.real()) &&
                          std::isfinite(t.amplitude.imag()),
                      Errc::invalid_argument, "superposition terms must be finite");
  }
};

inline SuperpositionSpec to_superposition(const TwoPathConfig& cfg) {
  return {{{cfg.a1, 0.0}, {cfg.a2, cfg.shift()}}, cfg.packet};
}

inline double superposition_density(double x, const SuperpositionSpec& spec) {
  complex sum{};
  for (const auto& t : spec.terms) {
    GaussianPacket copy = spec.packet;
    copy.center -= t.shift;
    sum += t.amplitude * eval_gaussian(x, copy);
  }
  return std::norm(sum);
}

/// P(x) / |G(x)|^2 for an advanced port. Below one for every x > 0 (relative to
/// the packet center) whenever the amplitudes are real and the peak is advanced.
inline double tail_ratio_front(double x, const TwoPathConfig& cfg) {
  detail::require(asymptotic_peak(cfg) > cfg.packet.center, Errc::invalid_argument,
                  "front tail ratio needs an advanced peak");
  const double u = (x - cfg.packet.center) / cfg.packet.width;
  const double s = cfg.shift() / cfg.packet.width;
  // G(x + v tau) / G(x)
  const double r = std::exp(-(2.0 * u * s + s * s));
  return std::norm(cfg.a1 + cfg.a2 * r);
}

/// P(x) / |G(x + v tau)|^2 for a delayed port, meaningful for x < -v tau.
inline double tail_ratio_rear(double x, const TwoPathConfig& cfg) {
  detail::require(asymptotic_peak(cfg) < cfg.packet.center, Errc::invalid_argument,
                  "rear tail ratio needs a delayed peak");
  const double u = (x - cfg.packet.center) / cfg.packet.width;
  const double s = cfg.shift() / cfg.packet.width;
  // G(x) / G(x + v tau)
  const double r = std::exp(2.0 * u * s + s * s);
  return std::norm(cfg.a2 + cfg.a1 * r);
}

/// Sampled density on a uniform grid.
struct DensityProfile {
  std::vector<double> positions;
  std::vector<double> values;
  double normalization = 0.0;  // trapezoidal mass over the grid
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  detail::require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, Errc::invalid_argument,
                  "grid bounds must satisfy lo < hi");
  detail::require(n >= 2, Errc::invalid_argument, "grid needs at least two points");
  std::vector<double> xs(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + h * static_cast<double>(i);
  xs.back() = hi;
  return xs;
}

inline double trapezoid(std::span<const double> xs, std::span<const double> ys) {
  double s = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) s += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
  return s;
}

template <class Density>
DensityProfile sample_profile(Density&& density, std::span<const double> grid) {
  DensityProfile out;
  out.positions.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  for (double x : grid) out.values.push_back(density(x));
  out.normalization = trapezoid(out.positions, out.values);
  return out;
}

/// Rescaled copy with unit mass.
inline DensityProfile normalized(DensityProfile p) {
  detail::require(p.normalization > kMinimumNorm, Errc::vanishing_norm,
                  "cannot normalise an empty profile");
  for (double& v : p.values) v /= p.normalization;
  p.normalization = 1.0;
  return p;
}

}  // namespace mzi
