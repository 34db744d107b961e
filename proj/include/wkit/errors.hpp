#pragma once

#include <stdexcept>
#include <string>

namespace wkit {

// Base of every domain error raised by the toolkit.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define WKIT_DEFINE_ERROR(Name)                                         \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

WKIT_DEFINE_ERROR(ModulusOutOfRange);
WKIT_DEFINE_ERROR(TruncationBudgetExceeded);
WKIT_DEFINE_ERROR(ZeroArgument);
WKIT_DEFINE_ERROR(PoleHit);
WKIT_DEFINE_ERROR(NonconvergentTau);
WKIT_DEFINE_ERROR(OutsideConvergenceAnnulus);
WKIT_DEFINE_ERROR(BranchDomainViolation);
WKIT_DEFINE_ERROR(NoSolution);
WKIT_DEFINE_ERROR(SingularLax);
WKIT_DEFINE_ERROR(LabelMismatch);
WKIT_DEFINE_ERROR(DimensionGuardExceeded);
WKIT_DEFINE_ERROR(InvalidParams);
WKIT_DEFINE_ERROR(ConfigError);

#undef WKIT_DEFINE_ERROR

}  // namespace wkit
