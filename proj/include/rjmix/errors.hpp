#pragma once

#include <stdexcept>
#include <string>

namespace rjmix {

// Sampling hit an interval whose probability mass underflows.
struct degeneracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical integration failed to converge (non-integrable tail, etc.).
struct integration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rjmix
