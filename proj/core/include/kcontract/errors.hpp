#pragma once

#include <stdexcept>
#include <string>

namespace kcontract {

inline constexpr const char* kVersion = "0.1.0";

/// Inputs violate an operation's contract (bad dimensions, bad flags, ...).
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A size guard tripped (compound construction is capped at n = 16).
struct CapacityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numeric value is NaN/Inf where a finite value is required.
struct NonFiniteError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A required prior check (reducibility gate, pair validation) did not pass.
struct PrerequisiteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The integrator could not continue (step underflow, non-finite derivative).
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kcontract
