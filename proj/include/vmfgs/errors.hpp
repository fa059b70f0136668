#pragma once

#include <stdexcept>
#include <string>

namespace vmfgs {

struct DimensionMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonHermitianError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonUnitStateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct WindowError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ResultantRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptySampleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ProbabilityRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroKappaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OrthogonalStartError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vmfgs
