#pragma once

#include <stdexcept>
#include <string>

namespace itreval {

// Bad arguments, malformed input files, violated preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The data are valid but a required quantity cannot be formed
// (an empty arm, a zero ATE in a ratio, an unestimable kappa profile).
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exhaustive enumeration would exceed the combinatorial guard.
class SizeGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A learner could not be fit (e.g. singular design without ridge penalty).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace itreval
