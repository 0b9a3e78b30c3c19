#pragma once

#include <stdexcept>
#include <string>

namespace cfnet {

// Base of every error the library throws. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define CFNET_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                          \
   public:                                                             \
    using Error::Error;                                                \
    const char* kind() const noexcept override { return #Name; }       \
  };

CFNET_DEFINE_ERROR(AlphabetError)
CFNET_DEFINE_ERROR(ParseError)
CFNET_DEFINE_ERROR(DomainError)
CFNET_DEFINE_ERROR(NodeIndexError)
CFNET_DEFINE_ERROR(ConditionError)
CFNET_DEFINE_ERROR(SubgraphBudgetError)
CFNET_DEFINE_ERROR(ModelError)
CFNET_DEFINE_ERROR(NoConvergence)

#undef CFNET_DEFINE_ERROR

}  // namespace cfnet
