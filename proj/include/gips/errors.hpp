#pragma once

#include <stdexcept>
#include <string>

namespace gips {

// Base of every error raised by the library. The concrete subclasses name the
// failure kinds used throughout the API contracts.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GIPS_DECLARE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

GIPS_DECLARE_ERROR(ParseError);
GIPS_DECLARE_ERROR(TypeError);
GIPS_DECLARE_ERROR(NotFound);
GIPS_DECLARE_ERROR(DanglingEdge);
GIPS_DECLARE_ERROR(StaleState);
GIPS_DECLARE_ERROR(InvalidMatch);
GIPS_DECLARE_ERROR(DivisionByZero);
GIPS_DECLARE_ERROR(UnboundRef);
GIPS_DECLARE_ERROR(NameCollision);
GIPS_DECLARE_ERROR(NumericalFailure);
GIPS_DECLARE_ERROR(SelectionConflict);
GIPS_DECLARE_ERROR(InfeasibleCycle);
GIPS_DECLARE_ERROR(ScenarioError);
GIPS_DECLARE_ERROR(PreconditionViolated);
GIPS_DECLARE_ERROR(MissingAttribute);
GIPS_DECLARE_ERROR(IoError);

#undef GIPS_DECLARE_ERROR

}  // namespace gips
