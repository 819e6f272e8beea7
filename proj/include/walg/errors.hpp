#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace walg {

// Error taxonomy shared by all modules.
//
// DomainError    - input outside an operation's mathematical domain
//                  (bad family/algebra pairing, malformed rational, ...).
// RangeError     - structurally valid input outside the supported range
//                  (level not built, cap exceeded, window too small).
// ResourceError  - an exact computation exceeded its step budget.
// AccuracyError  - a numerical routine could not reach the requested
//                  tolerance; carries the achieved residual.
// ConfigError    - run configuration rejected at validation time.

class DomainError : public std::invalid_argument {
public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

class RangeError : public std::out_of_range {
public:
  explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

class ResourceError : public std::runtime_error {
public:
  ResourceError(const std::string& what, unsigned long long steps)
      : std::runtime_error(what), steps_used(steps) {}
  unsigned long long steps_used;
};

class AccuracyError : public std::runtime_error {
public:
  AccuracyError(const std::string& what, double residual)
      : std::runtime_error(what), achieved_residual(residual) {}
  double achieved_residual;
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a Gram block that is required to be positive semidefinite
// turns out indefinite.  `witness` holds exact coordinates of a vector v
// in the level basis with <v, v> < 0.
class NegativeFormError : public std::runtime_error {
public:
  NegativeFormError(const std::string& what, std::vector<std::string> witness_coords)
      : std::runtime_error(what), witness(std::move(witness_coords)) {}
  std::vector<std::string> witness;
};

}  // namespace walg
