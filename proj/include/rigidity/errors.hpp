#pragma once

#include <stdexcept>
#include <string>

namespace rigidity {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RIGIDITY_DEFINE_ERROR(Name)                                 \
  class Name : public error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : error(#Name ": " + what) {} \
  }

// domains
RIGIDITY_DEFINE_ERROR(ParseError);
RIGIDITY_DEFINE_ERROR(UnsupportedDomain);
RIGIDITY_DEFINE_ERROR(ParameterOutOfRange);
RIGIDITY_DEFINE_ERROR(NonPositiveScale);
// curvature
RIGIDITY_DEFINE_ERROR(DegenerateMetric);
RIGIDITY_DEFINE_ERROR(SymmetryViolation);
// nakano
RIGIDITY_DEFINE_ERROR(DegreeMismatch);
RIGIDITY_DEFINE_ERROR(DegreeZero);
RIGIDITY_DEFINE_ERROR(DegreeOutOfRange);
// growth
RIGIDITY_DEFINE_ERROR(OnDivisor);
RIGIDITY_DEFINE_ERROR(EvaluationFailure);
RIGIDITY_DEFINE_ERROR(SingularMetric);
RIGIDITY_DEFINE_ERROR(QuadratureFailure);
// l2lab
RIGIDITY_DEFINE_ERROR(IllConditionedGram);
// cli
RIGIDITY_DEFINE_ERROR(UsageError);

#undef RIGIDITY_DEFINE_ERROR

}  // namespace rigidity
