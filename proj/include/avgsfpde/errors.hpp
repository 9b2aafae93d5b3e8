#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avgsfpde {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A time query outside the simulated range of a history.
struct RangeError : Error {
    using Error::Error;
};

struct ArgumentError : Error {
    using Error::Error;
};

/// An exponential moment requested outside the measure's finiteness range.
struct DivergenceError : Error {
    using Error::Error;
};

/// Non-finite value produced while evaluating a kernel or operator.
struct NumericError : Error {
    NumericError(const std::string& what, double theta)
        : Error(what), theta(theta) {}
    double theta;
};

struct UnsupportedError : Error {
    using Error::Error;
};

/// Raised by the stepper once step halving is exhausted.
struct BlowUpError : Error {
    BlowUpError(const std::string& what, double t, std::size_t mode)
        : Error(what), t(t), mode(mode) {}
    double t;
    std::size_t mode;
};

}  // namespace avgsfpde
