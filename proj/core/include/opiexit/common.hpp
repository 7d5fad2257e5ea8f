#pragma once

#include <stdexcept>

namespace opiexit {

// Bad user input: out-of-range parameters, malformed config, violated
// preconditions. The CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation that started from valid inputs failed: non-convergence,
// non-finite state, loss of definiteness. The CLI maps this to exit code 1.
struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace opiexit
