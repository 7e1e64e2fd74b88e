#pragma once

#include <stdexcept>
#include <string>

namespace pmqkd {

/// Thrown when an operation would need amplitude beyond a mode's Fock cutoff,
/// or when a truncated constructor's discarded tail mass exceeds its budget.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when two states or subsystems disagree in layout or dimension.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace pmqkd
