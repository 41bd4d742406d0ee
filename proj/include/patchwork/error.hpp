#pragma once

#include <stdexcept>
#include <string>

namespace patchwork {

/// Malformed or out-of-contract input (bad names, cycles, non-monotone maps,
/// size bounds). The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A consistency check that should be unreachable failed.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace patchwork
