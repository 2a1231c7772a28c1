#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace plap {

/// Base of every solver/validation failure. kind() is the stable error name
/// written to manifests and reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define PLAP_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

PLAP_DEFINE_ERROR(InvalidArgument)
PLAP_DEFINE_ERROR(NoContraction)
PLAP_DEFINE_ERROR(StepUnderflow)
PLAP_DEFINE_ERROR(BracketInvalid)
PLAP_DEFINE_ERROR(NoConvergence)
PLAP_DEFINE_ERROR(MaxIterations)
PLAP_DEFINE_ERROR(LineSearchFailure)
PLAP_DEFINE_ERROR(NoCrossing)
PLAP_DEFINE_ERROR(WindowTooSmall)
PLAP_DEFINE_ERROR(WindowEmpty)
PLAP_DEFINE_ERROR(HypothesisViolated)
PLAP_DEFINE_ERROR(IoError)

#undef PLAP_DEFINE_ERROR

}  // namespace plap
