#pragma once

#include <stdexcept>
#include <string>

namespace eit {

// Invalid or inconsistent user input (scheme files, CLI flags, presets).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: integrator breakdown, vanishing denominators, drift of
// invariants beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double diagnostic = 0.0)
      : std::runtime_error(what), diagnostic_(diagnostic) {}

  double diagnostic() const noexcept { return diagnostic_; }

 private:
  double diagnostic_;
};

}  // namespace eit
