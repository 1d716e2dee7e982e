#ifndef BNF_ERRORS_HPP
#define BNF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bnf {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A Fourier block of the right-hand side is not divisible by the linear
/// form it must be divided by; the homological equation has no formal
/// solution for this input.
struct ObstructionDetected : std::runtime_error {
    ObstructionDetected(std::string msg, double residue)
        : std::runtime_error(std::move(msg)), worst_residue(residue) {}
    double worst_residue = 0.0;
};

/// The extracted normal form is not a function of the quadratic part
/// (odd-degree content, or an even block not proportional to a power of N0).
struct A3Violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The requested number of steps needs more degrees than the cap provides.
struct DegreeBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A per-step hypothesis of the schedule failed in compliant mode.
struct ScheduleHypothesisFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bnf

#endif
