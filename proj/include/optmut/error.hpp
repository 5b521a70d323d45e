#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optmut {

enum class ErrorCode {
  UnknownVariable,
  UnknownParameter,
  DuplicateName,
  InvalidModel,
  NotInStandardForm,
  NonPositiveFactor,
  SyntaxError,
  UnknownSymbol,
  SchemaViolation,
  IoError,
  MissingVariable,
  BindingIncomplete,
  EvaluationError,
  DivisionByZero,
  InvalidMutation,
  NoApplicableOperator,
  NoValidMutants,
  PreconditionFailed,
  LlmOutputInvalid,
  ProviderUnavailable,
  FixtureMissing,
  UnbindableSuite,
};

std::string_view to_string(ErrorCode code);

// Library-wide exception. `location` carries a line:column or a JSON pointer
// when the failure can be pinned to a position in some input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string location = {})
      : std::runtime_error(message), code_(code), location_(std::move(location)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& location() const noexcept { return location_; }

  // "<Code>: <message> (at <location>)"
  std::string describe() const;

 private:
  ErrorCode code_;
  std::string location_;
};

}  // namespace optmut
