#pragma once

#include <stdexcept>
#include <string>

namespace dcmm {

// Invalid inputs: broken model invariants, malformed files, bad configuration.
// CLI maps these to exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical degeneracy: vanishing denominators, singular systems, eigen-gap
// failure. CLI maps these to exit code 3.
class degeneracy_error : public std::runtime_error {
 public:
  explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dcmm
