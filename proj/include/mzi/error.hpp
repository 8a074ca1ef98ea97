#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mzi {

enum class Errc {
  invalid_argument,         // malformed or out-of-range input
  singular_target,          // z == y in the designer
  degenerate_preselection,  // a component of |I> vanishes
  invalid_postselection,    // (D1, D2) not orthonormal
  pole,                     // |x| == v tau in the delay ratio
  dark_port,                // A1 + A2 == 0
  vanishing_norm,           // conditional quantity of an (almost) empty port
  dark_bracket,             // nothing to maximise inside the bracket
  invalid_amplitudes        // detection probability escaped [0, 1]
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::singular_target: return "singular-target";
    case Errc::degenerate_preselection: return "degenerate-preselection";
    case Errc::invalid_postselection: return "invalid-postselection";
    case Errc::pole: return "pole";
    case Errc::dark_port: return "dark-port";
    case Errc::vanishing_norm: return "vanishing-norm";
    case Errc::dark_bracket: return "dark-bracket";
    case Errc::invalid_amplitudes: return "invalid-amplitudes";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// Domain errors are well-posed requests that have no answer (a pole, a dark
  /// port); everything else is a usage error.
  bool is_domain() const noexcept { return code_ != Errc::invalid_argument; }

 private:
  Errc code_;
};

namespace detail {

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace detail
}  // namespace mzi
