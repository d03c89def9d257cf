#pragma once

#include <stdexcept>
#include <string>

namespace orefactor {

// Every failure carries a stable name; the CLI prints it on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define OREFACTOR_ERROR(Cls)                                                \
  class Cls : public Error {                                                \
   public:                                                                  \
    explicit Cls(const std::string& what = #Cls) : Error(#Cls, what) {}     \
  };

OREFACTOR_ERROR(ZeroInverse)
OREFACTOR_ERROR(NotPrime)
OREFACTOR_ERROR(NonCoprimeModuli)
OREFACTOR_ERROR(NoReconstruction)
OREFACTOR_ERROR(ContextMismatch)
OREFACTOR_ERROR(RecurrenceSingularIndex)
OREFACTOR_ERROR(DivisionDegenerate)
OREFACTOR_ERROR(IrregularPoint)
OREFACTOR_ERROR(BadReductionAtP)
OREFACTOR_ERROR(ZeroScale)
OREFACTOR_ERROR(InsufficientSeries)
OREFACTOR_ERROR(NoSolutionAtBounds)
OREFACTOR_ERROR(DegenerateSamples)
OREFACTOR_ERROR(InconsistentSamples)
OREFACTOR_ERROR(NonIntegerResult)
OREFACTOR_ERROR(NotAnExponent)
OREFACTOR_ERROR(NonIntegerExponent)
OREFACTOR_ERROR(SweepBudgetExceeded)
OREFACTOR_ERROR(NoSolutionAtDegree)
OREFACTOR_ERROR(ShapeMismatch)
OREFACTOR_ERROR(HoldoutMismatch)
OREFACTOR_ERROR(ConstraintViolation)
OREFACTOR_ERROR(ParseError)
OREFACTOR_ERROR(InvalidArgument)

#undef OREFACTOR_ERROR

}  // namespace orefactor
