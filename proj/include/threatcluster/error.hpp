#pragma once

#include <stdexcept>
#include <string>

namespace tc {

// Raised for malformed or inconsistent user input (files, configs, flags).
// The CLI maps this to exit code 2; anything else is an internal error.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tc
