#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mzi/mzi.hpp"

namespace mzi::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2 };

// ---------------------------------------------------------------------------
// Number formatting and parsing

/// Scientific notation, 12 significant digits.
inline std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

/// Shortest text that reads back to the same double.
inline std::string exact(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// The value JSON output carries: rounded to 12 significant digits.
inline double rounded(double v) { return std::stod(num(v)); }

inline std::string num(complex c) { return num(c.real()) + ":" + num(c.imag()); }

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  detail::require(used != 0 && used == s.size() && std::isfinite(v), Errc::invalid_argument,
                  "not a finite number: '" + s + "'");
  return v;
}

/// "re" or "re:im".
inline complex parse_complex(const std::string& s) {
  const auto parts = split(s, ':');
  detail::require(parts.size() == 1 || parts.size() == 2, Errc::invalid_argument,
                  "complex numbers are written re or re:im, got '" + s + "'");
  return {parse_real(parts[0]), parts.size() == 2 ? parse_real(parts[1]) : 0.0};
}

inline std::vector<complex> parse_complex_list(const std::string& s, std::size_t expected,
                                               const std::string& what) {
  std::vector<complex> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_complex(item));
  detail::require(out.size() == expected, Errc::invalid_argument,
                  what + " needs " + std::to_string(expected) + " comma-separated entries");
  return out;
}

inline std::vector<double> parse_ladder(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_real(item));
  return out;
}

/// "min:max:n" -> n widths spaced geometrically from min to max.
inline std::vector<double> geometric_ladder(const std::string& s) {
  const auto parts = split(s, ':');
  detail::require(parts.size() == 3, Errc::invalid_argument, "--ladder-geom expects min:max:n");
  const double lo = parse_real(parts[0]), hi = parse_real(parts[1]);
  const double n = parse_real(parts[2]);
  detail::require(lo > 0.0 && hi > lo && n >= 2.0 && n == std::floor(n), Errc::invalid_argument,
                  "--ladder-geom needs 0 < min < max and an integer n >= 2");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1)));
  out.back() = hi;
  return out;
}

/// "amp@shift,amp@shift,..." with amp in re or re:im form.
inline std::vector<SuperpositionTerm> parse_terms(const std::string& s) {
  std::vector<SuperpositionTerm> out;
  for (const auto& item : split(s, ',')) {
    const auto at = item.find('@');
    detail::require(at != std::string::npos, Errc::invalid_argument,
                    "superposition terms are written amp@shift, got '" + item + "'");
    out.push_back({parse_complex(item.substr(0, at)), parse_real(item.substr(at + 1))});
  }
  return out;
}

inline unsigned threads_from_env(const char* value) {
  if (value == nullptr || *value == '\0') return 0;
  const double v = parse_real(value);
  detail::require(v >= 1.0 && v == std::floor(v) && v <= 4096.0, Errc::invalid_argument,
                  "MZI_LAB_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

// ---------------------------------------------------------------------------
// Run configuration

struct Options {
  // amplitude sources
  std::optional<std::string> amplitudes;
  std::optional<double> y, z;
  std::optional<std::string> pre, post1, post2;
  std::optional<std::string> terms;

  // geometry
  std::optional<double> vtau;
  double velocity = 1.0;
  double center = 0.0;
  double width = 5.0;
  std::string port = "d1";

  // sampling and output
  std::size_t resolution = 4096;
  std::optional<std::string> ladder, ladder_geom;
  std::optional<double> lo, hi;
  std::optional<std::string> full_grid;
  std::optional<std::string> output;
  std::string format;
  bool normalized = false;

  // infer
  std::optional<double> length, xbar;
  double tau = 0.0;
  std::optional<double> eps;

  // larmor
  double tau1 = 0.0, tau2 = 0.0, omega = 1.0;
  std::string a1 = "1", a2 = "0";

  std::optional<std::string> config;
};

/// Resolved amplitudes plus how they were obtained.
struct Source {
  PathSet paths;
  std::optional<PostSelection> states;
  std::optional<QubitState> pre;
};

inline QubitState parse_state(const std::string& s, const std::string& what) {
  const auto c = parse_complex_list(s, 2, what);
  return QubitState::normalized(c[0], c[1]);
}

inline Source resolve_source(const Options& o) {
  const bool explicit_set = o.amplitudes.has_value();
  const bool target = o.y.has_value() || o.z.has_value();
  const bool triple = o.post1.has_value() || o.post2.has_value();
  const int sources = int(explicit_set) + int(target) + int(triple);
  detail::require(sources == 1, Errc::invalid_argument,
                  "give exactly one amplitude source: --amplitudes, --y/--z (optionally with --pre), "
                  "or --pre/--post1/--post2");

  Source src;
  if (explicit_set) {
    const auto a = parse_complex_list(*o.amplitudes, 4, "--amplitudes");
    src.paths = {a[0], a[1], a[2], a[3]};
    return src;
  }
  if (target) {
    detail::require(o.y.has_value() && o.z.has_value(), Errc::invalid_argument,
                    "the designer needs both --y and --z");
    const DesignTarget t{*o.y, *o.z};
    if (o.pre) {
      src.pre = parse_state(*o.pre, "--pre");
      src.states = design_states(*src.pre, t);
      src.paths = amplitudes_from_states(*src.pre, src.states->d1, src.states->d2);
    } else {
      src.paths = design_symmetric(t);
    }
    return src;
  }
  detail::require(o.pre && o.post1 && o.post2, Errc::invalid_argument,
                  "a state triple needs --pre, --post1 and --post2");
  src.pre = parse_state(*o.pre, "--pre");
  src.states = PostSelection{parse_state(*o.post1, "--post1"), parse_state(*o.post2, "--post2")};
  src.paths = amplitudes_from_states(*src.pre, src.states->d1, src.states->d2);
  return src;
}

/// v tau: --vtau, else -y from a designer target, else 1.
inline double resolve_vtau(const Options& o) {
  const double vtau = o.vtau ? *o.vtau : (o.y ? -*o.y : 1.0);
  detail::require(std::isfinite(vtau) && vtau >= 0.0, Errc::invalid_argument,
                  "v tau must be >= 0 (pass --vtau when y > 0)");
  return vtau;
}

inline Port resolve_port(const Options& o) {
  detail::require(o.port == "d1" || o.port == "d2", Errc::invalid_argument, "--port is d1 or d2");
  return o.port == "d1" ? Port::d1 : Port::d2;
}

inline std::vector<double> resolve_ladder(const Options& o) {
  detail::require(!(o.ladder && o.ladder_geom), Errc::invalid_argument,
                  "give either --ladder or --ladder-geom");
  if (o.ladder_geom) return geometric_ladder(*o.ladder_geom);
  return parse_ladder(o.ladder.value_or("0.1,0.2,0.5,1,2,5,10,20,50"));
}

inline void require_resolution(const Options& o) {
  detail::require(o.resolution >= kMinResolution, Errc::invalid_argument,
                  "--resolution must be >= 256");
}

/// --format, or the first allowed format when none was given.
inline std::string resolve_format(const Options& o, std::initializer_list<const char*> allowed) {
  if (o.format.empty()) return *allowed.begin();
  for (const char* f : allowed)
    if (o.format == f) return o.format;
  throw Error(Errc::invalid_argument, "unsupported --format '" + o.format + "'");
}

/// The stream output goes to: --output or the caller's stream.
class Sink {
 public:
  Sink(const std::optional<std::string>& path, std::ostream& fallback) : out_(&fallback) {
    if (path) {
      file_.open(*path);
      detail::require(file_.good(), Errc::invalid_argument, "cannot open " + *path + " for writing");
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline void write_paths_header(std::ostream& os, const PathSet& p) {
  os << "# amplitudes = " << num(p.a1) << "," << num(p.a2) << "," << num(p.a3) << "," << num(p.a4)
     << "\n";
}

inline json paths_json(const PathSet& p) {
  json j;
  const std::pair<const char*, complex> items[] = {{"A1", p.a1}, {"A2", p.a2}, {"A3", p.a3}, {"A4", p.a4}};
  for (const auto& [name, a] : items) {
    j[std::string(name) + "_re"] = rounded(a.real());
    j[std::string(name) + "_im"] = rounded(a.imag());
  }
  return j;
}

inline json state_json(const std::string& name, const QubitState& s) {
  return {{name + "_c1_re", rounded(s.c1.real())},
          {name + "_c1_im", rounded(s.c1.imag())},
          {name + "_c2_re", rounded(s.c2.real())},
          {name + "_c2_im", rounded(s.c2.imag())}};
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_design(const Options& o, std::ostream& out) {
  const std::string format = resolve_format(o, {"text", "json"});
  detail::require(!o.amplitudes, Errc::invalid_argument, "design takes a target or a state triple");
  const Source src = resolve_source(o);
  const PathSet& p = src.paths;
  const auto residual = conservation_residual(p);
  const double vtau = o.y ? -*o.y : 1.0;
  const std::string arg = exact(p.a1.real()) + ":" + exact(p.a1.imag()) + "," + exact(p.a2.real()) +
                          ":" + exact(p.a2.imag()) + "," + exact(p.a3.real()) + ":" +
                          exact(p.a3.imag()) + "," + exact(p.a4.real()) + ":" + exact(p.a4.imag());

  std::optional<double> peak;
  if (std::abs(p.a1 + p.a2) > 0.0) peak = asymptotic_peak(p.a1, p.a2, vtau);

  Sink sink(o.output, out);
  std::ostream& os = *sink;
  if (format == "json") {
    json j = paths_json(p);
    if (src.pre) j.update(state_json("I", *src.pre));
    if (src.states) {
      j.update(state_json("D1", src.states->d1));
      j.update(state_json("D2", src.states->d2));
    }
    j["conservation_residual"] = rounded(residual.worst());
    j["conserved"] = check_conservation(p);
    j["vtau"] = rounded(vtau);
    j["asymptotic_peak"] = peak ? json(rounded(*peak)) : json(nullptr);
    j["amplitudes_arg"] = arg;
    os << j.dump(2) << "\n";
    return kOk;
  }
  if (o.y && o.z) os << "# target y = " << num(*o.y) << ", z = " << num(*o.z) << "\n";
  const std::pair<const char*, complex> items[] = {{"A1", p.a1}, {"A2", p.a2}, {"A3", p.a3}, {"A4", p.a4}};
  for (const auto& [name, a] : items)
    os << name << " = " << num(a.real()) << " " << (a.imag() < 0 ? "-" : "+") << " "
       << num(std::abs(a.imag())) << "i\n";
  if (src.states) {
    os << "D1 = " << num(src.states->d1.c1) << "," << num(src.states->d1.c2) << "\n";
    os << "D2 = " << num(src.states->d2.c1) << "," << num(src.states->d2.c2) << "\n";
  }
  os << "conservation_residual = " << num(residual.worst()) << "\n";
  os << "conserved = " << (check_conservation(p) ? "true" : "false") << "\n";
  os << "asymptotic_peak = " << (peak ? num(*peak) : std::string("undefined (dark port)"))
     << "   # v tau = " << num(vtau) << "\n";
  os << "amplitudes_arg = " << arg << "\n";
  return kOk;
}

inline int cmd_scan(const Options& o, std::ostream& out, unsigned threads) {
  const std::string format = resolve_format(o, {"csv", "json"});
  require_resolution(o);
  const PathSet paths = resolve_source(o).paths;
  const double vtau = resolve_vtau(o);
  const Port port = resolve_port(o);
  const auto ladder = resolve_ladder(o);
  const auto records = width_scan(paths, vtau, ladder, {o.resolution, threads, port});

  Sink sink(o.output, out);
  std::ostream& os = *sink;
  if (format == "json") {
    json rows = json::array();
    for (const auto& r : records) {
      json minima = json::array();
      for (double m : r.minima_x) minima.push_back(rounded(m));
      rows.push_back({{"delta_x", rounded(r.delta_x)},
                      {"peak_x", rounded(r.peak_x)},
                      {"com_x", rounded(r.com_x)},
                      {"p_detect", rounded(r.p_detect)},
                      {"n_minima", r.minima_x.size()},
                      {"minima_x", minima}});
    }
    json j = {{"vtau", rounded(vtau)}, {"port", o.port}, {"resolution", o.resolution}, {"records", rows}};
    j["amplitudes"] = paths_json(paths);
    os << j.dump(2) << "\n";
  } else {
    os << "# mzi_lab scan\n";
    write_paths_header(os, paths);
    os << "# vtau = " << num(vtau) << "\n# port = " << o.port << "\n# resolution = " << o.resolution
       << "\n";
    os << "delta_x,peak_x,com_x,p_detect,n_minima,minima_x\n";
    for (const auto& r : records) {
      os << num(r.delta_x) << "," << num(r.peak_x) << "," << num(r.com_x) << "," << num(r.p_detect)
         << "," << r.minima_x.size();
      for (double m : r.minima_x) os << "," << num(m);
      os << "\n";
    }
  }

  if (o.full_grid) {
    const auto cfg = port_config(paths, port, {ladder.front(), 1.0, 0.0}, vtau);
    double lo = std::min(0.0, -vtau) - 2.0 * std::max(vtau, 1.0);
    double hi = 2.0 * std::max(vtau, 1.0);
    if (std::abs(cfg.a1 + cfg.a2) > 0.0) {
      const double xbar = asymptotic_peak(cfg);
      lo = std::min(lo, xbar - 2.0 * std::max(vtau, 1.0));
      hi = std::max(hi, xbar + 2.0 * std::max(vtau, 1.0));
    }
    lo = o.lo.value_or(lo);
    hi = o.hi.value_or(hi);
    const auto grid = contour_grid(paths, vtau, ladder, lo, hi, o.resolution, port);
    std::ofstream f(*o.full_grid);
    detail::require(f.good(), Errc::invalid_argument, "cannot open " + *o.full_grid + " for writing");
    f << "# mzi_lab scan --full-grid\n";
    write_paths_header(f, paths);
    f << "# vtau = " << num(vtau) << "\n# port = " << o.port << "\nx,delta_x,P\n";
    for (const auto& s : grid) f << num(s.x) << "," << num(s.delta_x) << "," << num(s.density) << "\n";
  }
  return kOk;
}

inline TwoPathConfig port_from_options(const Options& o, const PathSet& paths) {
  const double vtau = resolve_vtau(o);
  const GaussianPacket packet{o.width, o.velocity, o.center};
  packet.validate();
  auto cfg = port_config(paths, resolve_port(o), packet, vtau / o.velocity);
  cfg.validate();
  return cfg;
}

inline int cmd_compare(const Options& o, std::ostream& out) {
  const std::string format = resolve_format(o, {"csv", "json"});
  require_resolution(o);
  const PathSet paths = resolve_source(o).paths;
  const auto cfg = port_from_options(o, paths);
  auto cmp = compare_profiles(cfg, o.resolution);
  if (o.normalized) {
    cmp.exact = normalized(std::move(cmp.exact));
    cmp.asymptotic = normalized(std::move(cmp.asymptotic));
    cmp.free = normalized(std::move(cmp.free));
  }

  Sink sink(o.output, out);
  std::ostream& os = *sink;
  const auto& xs = cmp.exact.positions;
  if (format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i)
      rows.push_back({rounded(xs[i]), rounded(cmp.exact.values[i]), rounded(cmp.asymptotic.values[i]),
                      rounded(cmp.free.values[i])});
    json j = {{"columns", {"x", "exact", "asymptotic", "free"}},
              {"rows", rows},
              {"exact_peak", rounded(cmp.exact_peak)},
              {"asymptotic_peak", rounded(cmp.asymptotic_peak)},
              {"free_peak", rounded(cmp.free_peak)},
              {"peak_offset", rounded(cmp.peak_offset)},
              {"sup_distance", rounded(cmp.sup_distance)},
              {"sup_distance_rel", rounded(cmp.sup_distance_rel)},
              {"p_detect", rounded(cmp.p_detect)},
              {"front_bound_holds", cmp.front_bound_holds},
              {"normalized", o.normalized}};
    os << j.dump(2) << "\n";
    return kOk;
  }
  os << "# mzi_lab compare\n";
  write_paths_header(os, paths);
  os << "# port = " << o.port << "\n# width = " << num(o.width) << "\n# vtau = " << num(cfg.shift())
     << "\n# velocity = " << num(o.velocity) << "\n# center = " << num(o.center)
     << "\n# resolution = " << o.resolution << "\n# normalized = " << (o.normalized ? "true" : "false")
     << "\n";
  os << "x,exact,asymptotic,free\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << num(xs[i]) << "," << num(cmp.exact.values[i]) << "," << num(cmp.asymptotic.values[i]) << ","
       << num(cmp.free.values[i]) << "\n";
  os << "# summary exact_peak=" << num(cmp.exact_peak) << " asymptotic_peak=" << num(cmp.asymptotic_peak)
     << " free_peak=" << num(cmp.free_peak) << " peak_offset=" << num(cmp.peak_offset)
     << " sup_distance=" << num(cmp.sup_distance) << " sup_distance_rel=" << num(cmp.sup_distance_rel)
     << " p_detect=" << num(cmp.p_detect) << " front_bound=" << (cmp.front_bound_holds ? "true" : "false")
     << "\n";
  return kOk;
}

inline int cmd_density(const Options& o, std::ostream& out) {
  const std::string format = resolve_format(o, {"csv", "json"});
  require_resolution(o);

  SuperpositionSpec spec;
  std::array<double, 2> window{};
  std::string description;
  if (o.terms) {
    detail::require(!o.amplitudes && !o.y && !o.z && !o.pre && !o.post1 && !o.post2,
                    Errc::invalid_argument, "--terms replaces every other amplitude source");
    spec = {parse_terms(*o.terms), {o.width, o.velocity, o.center}};
    spec.validate();
    double smin = spec.terms.front().shift, smax = smin;
    for (const auto& t : spec.terms) smin = std::min(smin, t.shift), smax = std::max(smax, t.shift);
    window = {o.center - smax - 6.0 * o.width, o.center - smin + 6.0 * o.width};
    description = "# terms = " + *o.terms + "\n";
  } else {
    const PathSet paths = resolve_source(o).paths;
    const auto cfg = port_from_options(o, paths);
    spec = to_superposition(cfg);
    window = scan_window(cfg);
    std::ostringstream d;
    write_paths_header(d, paths);
    d << "# port = " << o.port << "\n# vtau = " << num(cfg.shift()) << "\n";
    description = d.str();
  }
  const double lo = o.lo.value_or(window[0]), hi = o.hi.value_or(window[1]);
  auto profile = sample_profile([&](double x) { return superposition_density(x, spec); },
                                uniform_grid(lo, hi, o.resolution));
  const double mass = profile.normalization;
  if (o.normalized) profile = normalized(std::move(profile));

  Sink sink(o.output, out);
  std::ostream& os = *sink;
  if (format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < profile.positions.size(); ++i)
      rows.push_back({rounded(profile.positions[i]), rounded(profile.values[i])});
    os << json{{"columns", {"x", "value"}}, {"rows", rows}, {"mass", rounded(mass)}, {"normalized", o.normalized}}.dump(2)
       << "\n";
    return kOk;
  }
  os << "# mzi_lab density\n" << description;
  os << "# width = " << num(o.width) << "\n# velocity = " << num(o.velocity) << "\n# center = " << num(o.center)
     << "\n# resolution = " << o.resolution << "\n# normalized = " << (o.normalized ? "true" : "false")
     << "\n# mass = " << num(mass) << "\n";
  os << "x,value\n";
  for (std::size_t i = 0; i < profile.positions.size(); ++i)
    os << num(profile.positions[i]) << "," << num(profile.values[i]) << "\n";
  return kOk;
}

inline int cmd_infer(const Options& o, std::ostream& out) {
  const std::string format = resolve_format(o, {"json"});
  detail::require(o.length && o.xbar, Errc::invalid_argument, "infer needs --length and --xbar");
  const auto r = o.eps ? infer_tau_inside(*o.length, o.velocity, *o.xbar, o.tau, *o.eps)
                       : infer_tau_inside(*o.length, o.velocity, *o.xbar, o.tau);
  Sink sink(o.output, out);
  *sink << json{{"L", rounded(r.length)},
                {"v", rounded(r.velocity)},
                {"xbar", rounded(r.xbar)},
                {"tau", rounded(r.tau)},
                {"tau_inside", rounded(r.tau_inside)},
                {"classification", std::string(to_string(r.classification))}}
               .dump(2)
        << "\n";
  return kOk;
}

inline int cmd_larmor(const Options& o, std::ostream& out) {
  const std::string format = resolve_format(o, {"text", "json"});
  const LarmorConfig cfg{o.tau1, o.tau2, parse_complex(o.a1), parse_complex(o.a2), o.omega};
  const double t = complex_time(cfg);
  const double phi = larmor_angle(cfg);
  Sink sink(o.output, out);
  std::ostream& os = *sink;
  if (format == "json") {
    os << json{{"phi", rounded(phi)}, {"complex_time_re", rounded(t)}, {"omega", rounded(o.omega)}}.dump(2) << "\n";
    return kOk;
  }
  os << "phi = " << num(phi) << "\n";
  os << "complex_time_re = " << num(t) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// Config file overlay

namespace config_file {

inline std::vector<std::string> config_values(const json& v) {
  auto scalar = [](const json& e) -> std::string {
    if (e.is_string()) return e.get<std::string>();
    if (e.is_boolean()) return e.get<bool>() ? "true" : "false";
    if (e.is_number_integer()) return std::to_string(e.get<long long>());
    if (e.is_number()) return exact(e.get<double>());
    throw Error(Errc::invalid_argument, "config values must be scalars or arrays of scalars");
  };
  if (!v.is_array()) return {scalar(v)};
  std::string joined;
  for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + scalar(v[i]);
  return {joined};
}

inline void apply_entry(CLI::App& sub, const std::string& key, const json& value) {
  CLI::Option* opt = sub.get_option_no_throw("--" + key);
  if (opt == nullptr) return;
  if (opt->count() > 0) return;  // command line wins
  opt->add_result(config_values(value));
  opt->run_callback();
}

/// Overlay a JSON object onto the options of `sub` that were not given on the
/// command line. Top-level keys apply to every subcommand that knows them; an
/// object under the subcommand's name applies to that subcommand only.
inline void apply_config(CLI::App& app, CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), Errc::invalid_argument, "cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_argument, std::string("config file: ") + e.what());
  }
  detail::require(doc.is_object(), Errc::invalid_argument, "config file must hold a JSON object");

  std::vector<std::string> names;
  for (const CLI::App* s : app.get_subcommands({})) names.push_back(s->get_name());
  if (auto it = doc.find(sub.get_name()); it != doc.end()) {
    detail::require(it->is_object(), Errc::invalid_argument, "config section must be an object");
    for (const auto& [k, v] : it->items()) {
      detail::require(sub.get_option_no_throw("--" + k) != nullptr, Errc::invalid_argument,
                           "unknown config key '" + sub.get_name() + "." + k + "'");
      apply_entry(sub, k, v);
    }
  }
  for (const auto& [k, v] : doc.items()) {
    if (std::find(names.begin(), names.end(), k) != names.end()) continue;
    bool known = false;
    for (const CLI::App* s : app.get_subcommands({})) known |= s->get_option_no_throw("--" + k) != nullptr;
    detail::require(known, Errc::invalid_argument, "unknown config key '" + k + "'");
    apply_entry(sub, k, v);
  }
}

}  // namespace config_file

// ---------------------------------------------------------------------------
// Entry point

inline void add_source_options(CLI::App& sub, Options& o) {
  sub.add_option("--amplitudes", o.amplitudes, "A1,A2,A3,A4 as re or re:im");
  sub.add_option("--y", o.y, "pointer shift for the designer (y = -v tau)");
  sub.add_option("--z", o.z, "target asymptotic peak position for the designer");
  sub.add_option("--pre", o.pre, "pre-selected state c1,c2");
  sub.add_option("--post1", o.post1, "post-selected state D1 as c1,c2");
  sub.add_option("--post2", o.post2, "post-selected state D2 as c1,c2");
}

inline void add_geometry_options(CLI::App& sub, Options& o) {
  sub.add_option("--vtau", o.vtau, "right-arm shift v tau (default -y, else 1)");
  sub.add_option("--port", o.port, "detector port, d1 or d2")->capture_default_str();
  sub.add_option("--resolution", o.resolution, "grid points (>= 256)")->capture_default_str();
}

/// Runs the command line `args` (without the program name). Returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err,
               const char* threads_env = nullptr) {
  CLI::App app{"Two-arm interferometer wave-packet laboratory", "mzi_lab"};
  app.require_subcommand(1);
  Options o;

  auto* design = app.add_subcommand("design", "path amplitudes for a target peak shift");
  add_source_options(*design, o);

  auto* scan = app.add_subcommand("scan", "peak, COM and extrema over a ladder of packet widths");
  add_source_options(*scan, o);
  add_geometry_options(*scan, o);
  scan->add_option("--ladder", o.ladder, "comma-separated increasing widths");
  scan->add_option("--ladder-geom", o.ladder_geom, "geometric ladder min:max:n");
  scan->add_option("--full-grid", o.full_grid, "also write (x, delta_x, P) triples to this file");
  scan->add_option("--grid-lo", o.lo, "lower x bound of the full grid");
  scan->add_option("--grid-hi", o.hi, "upper x bound of the full grid");

  auto* compare = app.add_subcommand("compare", "exact, broad-packet and free densities on one grid");
  add_source_options(*compare, o);
  add_geometry_options(*compare, o);

  auto* density = app.add_subcommand("density", "sampled density of one port or of a superposition");
  add_source_options(*density, o);
  add_geometry_options(*density, o);
  density->add_option("--terms", o.terms, "superposition amp@shift,amp@shift,...");
  density->add_option("--lo", o.lo, "lower x bound");
  density->add_option("--hi", o.hi, "upper x bound");

  for (auto* sub : {compare, density}) {
    sub->add_option("--width", o.width, "packet width")->capture_default_str();
    sub->add_option("--velocity", o.velocity, "packet velocity")->capture_default_str();
    sub->add_option("--center", o.center, "left-arm packet center")->capture_default_str();
    sub->add_flag("--normalized", o.normalized, "rescale every profile to unit mass");
  }

  auto* infer = app.add_subcommand("infer", "naive time between the beamsplitters from a peak shift");
  infer->add_option("--length", o.length, "beamsplitter separation L along the left arm");
  infer->add_option("--velocity", o.velocity, "packet velocity")->capture_default_str();
  infer->add_option("--xbar", o.xbar, "peak advancement");
  infer->add_option("--tau", o.tau, "right-arm delay")->capture_default_str();
  infer->add_option("--eps", o.eps, "zero-crossing tolerance (default 1e-12 L/v)");

  auto* larmor = app.add_subcommand("larmor", "Larmor-clock rotation angle");
  larmor->add_option("--tau1", o.tau1, "time in the field via arm 1")->capture_default_str();
  larmor->add_option("--tau2", o.tau2, "time in the field via arm 2")->capture_default_str();
  larmor->add_option("--a1", o.a1, "amplitude via arm 1 (re or re:im)")->capture_default_str();
  larmor->add_option("--a2", o.a2, "amplitude via arm 2 (re or re:im)")->capture_default_str();
  larmor->add_option("--omega", o.omega, "Larmor frequency")->capture_default_str();

  for (auto* sub : {design, scan, compare, density, infer, larmor}) {
    sub->add_option("-o,--output", o.output, "write to this file instead of stdout");
    sub->add_option("--format", o.format, "output format");
    sub->add_option("--config", o.config, "JSON file with option defaults");
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mzi_lab: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (o.config) config_file::apply_config(app, *sub, *o.config);
    const unsigned threads = threads_from_env(threads_env);
    const std::string name = sub->get_name();
    if (name == "design") return cmd_design(o, out);
    if (name == "scan") return cmd_scan(o, out, threads);
    if (name == "compare") return cmd_compare(o, out);
    if (name == "density") return cmd_density(o, out);
    if (name == "infer") return cmd_infer(o, out);
    return cmd_larmor(o, out);
  } catch (const Error& e) {
    err << "mzi_lab: " << e.what() << "\n";
    return e.is_domain() ? kDomain : kUsage;
  } catch (const CLI::ParseError& e) {
    err << "mzi_lab: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace mzi::cli
