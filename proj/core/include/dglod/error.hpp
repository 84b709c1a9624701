#pragma once

#include <stdexcept>
#include <string>

namespace dglod {

// Raised for invalid input, malformed files and failed factorizations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dglod
