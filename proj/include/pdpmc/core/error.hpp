#pragma once

#include <stdexcept>
#include <string>

namespace pdpmc {

/// Precondition violated by the caller (bad shapes, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A model produced a negative jump rate.
class NegativeRate : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical inversion of the waiting-time law or an ODE step failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pdpmc
