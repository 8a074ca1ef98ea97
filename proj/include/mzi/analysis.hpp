#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "mzi/amplitudes.hpp"
#include "mzi/density.hpp"
#include "mzi/error.hpp"
#include "mzi/peak.hpp"
#include "mzi/quadrature.hpp"
#include "mzi/wavepacket.hpp"

namespace mzi {

// ---------------------------------------------------------------------------
// Windows and moments

/// Interval holding both arm packets and the broad-packet asymptote, padded by
/// `pad` widths: [min(0, -v tau, xbar) - pad w, max(0, xbar) + pad w], shifted
/// by the packet center. A dark port contributes no asymptote.
inline std::array<double, 2> scan_window(const TwoPathConfig& cfg, double pad = 6.0) {
  const double x0 = cfg.packet.center;
  double lo = std::min(x0, x0 - cfg.shift());
  double hi = x0;
  if (std::abs(cfg.a1 + cfg.a2) > 0.0) {
    const double xbar = asymptotic_peak(cfg);
    lo = std::min(lo, xbar);
    hi = std::max(hi, xbar);
  }
  return {lo - pad * cfg.packet.width, hi + pad * cfg.packet.width};
}

/// Default quadrature bounds: 12 widths beyond the outermost arm packet.
inline std::array<double, 2> quadrature_bounds(const TwoPathConfig& cfg) {
  const double x0 = cfg.packet.center;
  const double w = kQuadratureHalfSpan * cfg.packet.width;
  return {std::min(x0, x0 - cfg.shift()) - w, std::max(x0, x0 - cfg.shift()) + w};
}

inline constexpr double kComRelTol = 1e-9;

/// int x P / int P over [lo, hi] by adaptive quadrature.
template <class F>
double center_of_mass(F&& density, double lo, double hi, std::span<const double> breakpoints = {}) {
  const double mass = integrate(density, lo, hi, breakpoints);
  detail::require(mass > kMinimumNorm, Errc::vanishing_norm, "no mass inside the bounds");
  const double first = integrate([&](double x) { return x * density(x); }, lo, hi, breakpoints);
  return first / mass;
}

/// COM of a port, integrated over its default quadrature bounds.
inline double center_of_mass(const TwoPathConfig& cfg) {
  const auto [lo, hi] = quadrature_bounds(cfg);
  const std::array<double, 2> centers{cfg.packet.center, cfg.packet.center - cfg.shift()};
  return center_of_mass([&](double x) { return density_d1(x, cfg); }, lo, hi, centers);
}

// ---------------------------------------------------------------------------
// Extrema on a sampled profile

struct Extrema {
  std::vector<double> maxima;
  std::vector<double> minima;
};

inline constexpr double kMinimumDepth = 0.999;

/// Strict interior extrema of a sampled profile. A minimum only counts when it
/// lies below kMinimumDepth of the lower of its two neighbouring hill tops, so
/// rounding ripples on a flat density are ignored.
inline Extrema find_extrema(std::span<const double> xs, std::span<const double> ys) {
  Extrema out;
  const std::size_t n = ys.size();
  if (n < 3) return out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (ys[i] > ys[i - 1] && ys[i] > ys[i + 1]) {
      out.maxima.push_back(xs[i]);
    } else if (ys[i] < ys[i - 1] && ys[i] < ys[i + 1]) {
      std::size_t l = i;
      while (l > 0 && ys[l - 1] >= ys[l]) --l;
      std::size_t r = i;
      while (r + 1 < n && ys[r + 1] >= ys[r]) ++r;
      if (ys[i] < kMinimumDepth * std::min(ys[l], ys[r])) out.minima.push_back(xs[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Width scan

enum class Port { d1, d2 };

inline TwoPathConfig port_config(const PathSet& p, Port port, const GaussianPacket& packet,
                                 double delay) {
  return port == Port::d1 ? port_d1(p, packet, delay) : port_d2(p, packet, delay);
}

inline constexpr std::size_t kMinResolution = 256;

struct WidthScanRecord {
  double delta_x = 0.0;
  double peak_x = 0.0;
  double com_x = 0.0;
  std::vector<double> minima_x;
  std::vector<double> maxima_x;
  double p_detect = 0.0;
};

struct ScanOptions {
  std::size_t resolution = 4096;  // grid points per rung, >= 256
  unsigned threads = 0;           // 0: hardware concurrency
  Port port = Port::d1;
};

namespace detail {

inline unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Runs body(i) for i in [0, jobs) on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t jobs, unsigned threads, Body&& body) {
  const unsigned workers = worker_count(threads, jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

// The profile grid may be coarse; the peak search always starts from >= 2048 nodes.
inline std::size_t peak_grid(std::size_t resolution) { return std::max<std::size_t>(resolution, 2048); }

inline void validate_ladder(std::span<const double> ladder) {
  require(!ladder.empty(), Errc::invalid_argument, "width ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    require(std::isfinite(ladder[i]) && ladder[i] > 0.0, Errc::invalid_argument,
            "ladder widths must be finite and > 0");
    require(i == 0 || ladder[i] > ladder[i - 1], Errc::invalid_argument,
            "ladder must be strictly increasing");
  }
}

}  // namespace detail

inline WidthScanRecord scan_rung(const TwoPathConfig& cfg, std::size_t resolution) {
  cfg.validate();
  const auto density = [&](double x) { return density_d1(x, cfg); };
  const auto [lo, hi] = scan_window(cfg);
  const auto grid = uniform_grid(lo, hi, resolution);
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), density);
  auto extrema = find_extrema(grid, values);

  WidthScanRecord rec;
  rec.delta_x = cfg.packet.width;
  rec.peak_x = find_peak(density, lo, hi, {.grid_points = detail::peak_grid(resolution)});
  rec.com_x = center_of_mass(cfg);
  rec.minima_x = std::move(extrema.minima);
  rec.maxima_x = std::move(extrema.maxima);
  rec.p_detect = detection_probability(cfg);
  return rec;
}

/// Peak, COM, interior extrema and detection probability of one port as the
/// packet width runs over `ladder`, with the right arm shifted by `vtau`.
/// Lengths are in units where v = 1. Records come back in ladder order.
inline std::vector<WidthScanRecord> width_scan(const PathSet& paths, double vtau,
                                               std::span<const double> ladder,
                                               const ScanOptions& opts = {}) {
  detail::validate_ladder(ladder);
  detail::require(std::isfinite(vtau) && vtau >= 0.0, Errc::invalid_argument, "v tau must be >= 0");
  detail::require(opts.resolution >= kMinResolution, Errc::invalid_argument, "resolution must be >= 256");
  std::vector<WidthScanRecord> out(ladder.size());
  detail::parallel_for(ladder.size(), opts.threads, [&](std::size_t i) {
    const GaussianPacket packet{ladder[i], 1.0, 0.0};
    out[i] = scan_rung(port_config(paths, opts.port, packet, vtau), opts.resolution);
  });
  return out;
}

struct ContourSample {
  double x = 0.0;
  double delta_x = 0.0;
  double density = 0.0;
};

/// P(x) on a shared x grid for every rung; the data behind a contour plot.
inline std::vector<ContourSample> contour_grid(const PathSet& paths, double vtau,
                                               std::span<const double> ladder, double lo,
                                               double hi, std::size_t points, Port port = Port::d1) {
  detail::validate_ladder(ladder);
  const auto grid = uniform_grid(lo, hi, points);
  std::vector<ContourSample> out;
  out.reserve(grid.size() * ladder.size());
  for (double w : ladder) {
    const auto cfg = port_config(paths, port, {w, 1.0, 0.0}, vtau);
    cfg.validate();
    for (double x : grid) out.push_back({x, w, density_d1(x, cfg)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact vs asymptotic vs free comparison

struct ProfileComparison {
  DensityProfile exact;       // P(x), mass = detection probability
  DensityProfile asymptotic;  // broad-packet Gaussian, mass |A1 + A2|^2
  DensityProfile free;        // |G(x)|^2, left arm only
  double exact_peak = 0.0;
  double asymptotic_peak = 0.0;
  double free_peak = 0.0;
  double peak_offset = 0.0;       // asymptotic_peak - exact_peak
  double sup_distance = 0.0;      // between the unit-mass exact and asymptotic densities
  double sup_distance_rel = 0.0;  // sup_distance over the unit-mass asymptotic peak height
  double p_detect = 0.0;
  bool front_bound_holds = true;  // exact < free at every sample ahead of the free peak
};

inline ProfileComparison compare_profiles(const TwoPathConfig& cfg, std::size_t resolution = 4096) {
  cfg.validate();
  detail::require(resolution >= kMinResolution, Errc::invalid_argument, "resolution must be >= 256");
  const double xbar = asymptotic_peak(cfg);  // throws on a dark port
  const auto [lo, hi] = scan_window(cfg);
  const auto grid = uniform_grid(lo, hi, resolution);
  const auto exact = [&](double x) { return density_d1(x, cfg); };

  ProfileComparison out;
  out.exact = sample_profile(exact, grid);
  out.asymptotic = sample_profile([&](double x) { return asymptotic_density(x, cfg); }, grid);
  out.free = sample_profile(
      [&](double x) {
        const double g = eval_gaussian(x, cfg.packet);
        return g * g;
      },
      grid);
  out.exact_peak = find_peak(exact, lo, hi, {.grid_points = detail::peak_grid(resolution)});
  out.asymptotic_peak = xbar;
  out.free_peak = cfg.packet.center;
  out.peak_offset = xbar - out.exact_peak;
  out.p_detect = detection_probability(cfg);

  const double p_asym = std::norm(cfg.a1 + cfg.a2);
  const double asym_height = 1.0 / std::sqrt(std::numbers::pi * cfg.packet.width * cfg.packet.width / 2.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::abs(out.exact.values[i] / out.p_detect - out.asymptotic.values[i] / p_asym);
    out.sup_distance = std::max(out.sup_distance, d);
    if (grid[i] > cfg.packet.center && !(out.exact.values[i] < out.free.values[i]))
      out.front_bound_holds = false;
  }
  out.sup_distance_rel = out.sup_distance / asym_height;
  return out;
}

// ---------------------------------------------------------------------------
// Naive time inference

enum class TimeClass { normal, zero_crossing, negative, abnormal_delay };

constexpr std::string_view to_string(TimeClass c) noexcept {
  switch (c) {
    case TimeClass::normal: return "normal";
    case TimeClass::zero_crossing: return "zero-crossing";
    case TimeClass::negative: return "negative";
    case TimeClass::abnormal_delay: return "abnormal-delay";
  }
  return "unknown";
}

struct TimeInference {
  double length = 0.0;  // L, beamsplitter separation along the left arm
  double velocity = 0.0;
  double xbar = 0.0;
  double tau = 0.0;  // right-arm delay, sets the abnormal-delay threshold
  double tau_inside = 0.0;
  TimeClass classification = TimeClass::normal;
};

/// Duration "spent between the beamsplitters" read off the peak position,
/// L/v - xbar/v, and which of its pathologies it exhibits. `eps_t` defaults to
/// 1e-12 L/v.
inline TimeInference infer_tau_inside(double length, double velocity, double xbar, double tau,
                                      double eps_t = std::numeric_limits<double>::quiet_NaN()) {
  detail::require(std::isfinite(length) && length > 0.0, Errc::invalid_argument, "L must be > 0");
  detail::require(std::isfinite(velocity) && velocity > 0.0, Errc::invalid_argument,
                  "v must be > 0");
  detail::require(std::isfinite(xbar) && std::isfinite(tau), Errc::invalid_argument,
                  "xbar and tau must be finite");
  if (std::isnan(eps_t)) eps_t = 1e-12 * length / velocity;
  detail::require(eps_t >= 0.0, Errc::invalid_argument, "eps_t must be >= 0");

  TimeInference out{length, velocity, xbar, tau, length / velocity - xbar / velocity};
  if (std::abs(out.tau_inside) <= eps_t)
    out.classification = TimeClass::zero_crossing;
  else if (out.tau_inside < 0.0)
    out.classification = TimeClass::negative;
  else if (out.tau_inside > length / velocity + tau)
    out.classification = TimeClass::abnormal_delay;
  else
    out.classification = TimeClass::normal;
  return out;
}

// ---------------------------------------------------------------------------
// Larmor clock

struct LarmorConfig {
  double tau1 = 0.0;  // time in the field via arm 1
  double tau2 = 0.0;  // via arm 2
  complex a1{1.0, 0.0};
  complex a2{};
  double omega = 1.0;  // Larmor frequency
};

/// Re[(tau1 A1 + tau2 A2) / (A1 + A2)], the real part of the "complex time",
/// evaluated as tau1 + (tau2 - tau1) Re[A2 / (A1 + A2)].
inline double complex_time(const LarmorConfig& cfg) {
  const complex sum = cfg.a1 + cfg.a2;
  detail::require(std::abs(sum) > 0.0, Errc::dark_port, "A1 + A2 vanishes");
  return cfg.tau1 + (cfg.tau2 - cfg.tau1) * (cfg.a2 / sum).real();
}

/// Spin rotation angle at the exit.
inline double larmor_angle(const LarmorConfig& cfg) { return cfg.omega * complex_time(cfg); }

}  // namespace mzi
