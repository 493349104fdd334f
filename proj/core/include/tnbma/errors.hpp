#pragma once

#include <stdexcept>
#include <string>

namespace tnbma {

// Malformed or inconsistent input data (archives, model files, configs).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure during fitting or scoring.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tnbma
