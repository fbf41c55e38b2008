#pragma once

#include <stdexcept>

namespace scos {

// Bad user-supplied data (config, CSV, scenario tree, CLI parameters).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A broken internal invariant; never caused by input.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace scos
