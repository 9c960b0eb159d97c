#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dwsc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown id (concept, service, location, data item).
struct LookupError : Error {
  using Error::Error;
};

// A model invariant does not hold.
struct ValidationError : Error {
  using Error::Error;
};

// Malformed or inconsistent dataset/plan file.
struct LoadError : Error {
  using Error::Error;
};

struct GenerationError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// A service sequence that cannot source all required concepts.
struct InfeasibleSequenceError : Error {
  std::vector<std::string> uncovered;  // concept ids left unsatisfied

  InfeasibleSequenceError(const std::string& msg, std::vector<std::string> unc)
      : Error(msg), uncovered(std::move(unc)) {}
};

}  // namespace dwsc
