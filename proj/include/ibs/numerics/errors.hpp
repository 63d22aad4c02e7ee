#pragma once

#include <stdexcept>
#include <string>

namespace ibs {

/// Base class of every error raised by the library.  `kind()` is a stable
/// machine-readable tag used by the CLI error records.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define IBS_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        using Error::Error;                                                 \
        const char* kind() const noexcept override { return #Name; }        \
    }

// Numerical singularity of an assembled operator (resonant potential).
IBS_DEFINE_ERROR(SingularOperator);
IBS_DEFINE_ERROR(EmptySpectrum);
IBS_DEFINE_ERROR(GridMismatch);
IBS_DEFINE_ERROR(IncompatibleGrids);
IBS_DEFINE_ERROR(CompositionOverflow);
IBS_DEFINE_ERROR(ZeroLinearCoefficient);
IBS_DEFINE_ERROR(ConditionViolated);
IBS_DEFINE_ERROR(EqualFrequencies);
IBS_DEFINE_ERROR(NonPositiveSigma);
IBS_DEFINE_ERROR(ConfigError);

#undef IBS_DEFINE_ERROR

}  // namespace ibs
