#pragma once

#include <stdexcept>
#include <string>

namespace biquat {

// Base class for every library error. All failure modes are reported by
// throwing one of the named subclasses below; the library never returns NaN
// to signal a domain problem.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define BIQUAT_DEFINE_ERROR(Name)                            \
  struct Name : Error {                                      \
    explicit Name(const std::string& what_arg)               \
        : Error(std::string(#Name) + ": " + what_arg) {}     \
  }

BIQUAT_DEFINE_ERROR(SingularDenominator);
BIQUAT_DEFINE_ERROR(InvalidIndex);
BIQUAT_DEFINE_ERROR(SingularMatrix);
BIQUAT_DEFINE_ERROR(OutOfDomain);
BIQUAT_DEFINE_ERROR(DimensionMismatch);
BIQUAT_DEFINE_ERROR(BadRadius);
BIQUAT_DEFINE_ERROR(OnBoundary);
BIQUAT_DEFINE_ERROR(DegenerateEigenvalues);
BIQUAT_DEFINE_ERROR(NonConvergence);
BIQUAT_DEFINE_ERROR(OutsideConvergenceRegion);
BIQUAT_DEFINE_ERROR(CoincidentPoints);
BIQUAT_DEFINE_ERROR(NotInKernel);
BIQUAT_DEFINE_ERROR(SingularOnCycle);
BIQUAT_DEFINE_ERROR(ProjectiveSingularity);
BIQUAT_DEFINE_ERROR(OutsideAdmissibleRegion);
BIQUAT_DEFINE_ERROR(InvalidLambda);
BIQUAT_DEFINE_ERROR(UnknownSuite);
BIQUAT_DEFINE_ERROR(ConfigInvalid);

#undef BIQUAT_DEFINE_ERROR

}  // namespace biquat
