#pragma once

#include <cmath>
#include <numbers>

#include "mzi/error.hpp"

namespace mzi {

/// Free Gaussian packet G(x) = (pi w^2 / 2)^(-1/4) exp(-(x - x0)^2 / w^2).
///
/// The squared modulus is a unit-mass normal density with standard deviation
/// w / 2. Spreading is not modelled; the profile only translates.
struct GaussianPacket {
  double width = 1.0;     // w > 0
  double velocity = 1.0;  // v > 0
  double center = 0.0;    // x0

  void validate() const {
    detail::require(std::isfinite(width) && width > 0.0, Errc::invalid_argument,
                    "packet width must be finite and > 0");
    detail::require(std::isfinite(velocity) && velocity > 0.0, Errc::invalid_argument,
                    "packet velocity must be finite and > 0");
    detail::require(std::isfinite(center), Errc::invalid_argument,
                    "packet center must be finite");
  }

  friend bool operator==(const GaussianPacket&, const GaussianPacket&) = default;
};

/// Half-span, in widths, of the default integration window around the outermost
/// packet center. |G|^2 has dropped below 1e-120 of its peak there.
inline constexpr double kQuadratureHalfSpan = 12.0;

inline double gaussian_prefactor(double width) noexcept {
  return 1.0 / std::sqrt(std::sqrt(std::numbers::pi * width * width / 2.0));
}

/// Amplitude of the packet at x, in length^(-1/2).
inline double eval_gaussian(double x, const GaussianPacket& packet) {
  detail::require(std::isfinite(x), Errc::invalid_argument, "position must be finite");
  const double u = (x - packet.center) / packet.width;
  return gaussian_prefactor(packet.width) * std::exp(-u * u);
}

/// The packet that has been held back by `delay` relative to `packet`; in the
/// two-arm setup this is the G(x + v tau) term.
inline GaussianPacket shifted_copy(const GaussianPacket& packet, double delay) {
  detail::require(std::isfinite(delay), Errc::invalid_argument, "delay must be finite");
  GaussianPacket out = packet;
  out.center = packet.center - packet.velocity * delay;
  return out;
}

}  // namespace mzi
