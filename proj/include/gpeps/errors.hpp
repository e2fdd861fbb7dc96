#pragma once

#include <stdexcept>
#include <string>

namespace gpeps {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedObservable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an iterative solver fails to reach its tolerance.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, double residual)
        : std::runtime_error(msg), residual(residual) {}
    double residual;
};

} // namespace gpeps
