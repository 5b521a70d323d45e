#include "optmut/error.hpp"

namespace optmut {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NotInStandardForm: return "NotInStandardForm";
    case ErrorCode::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingVariable: return "MissingVariable";
    case ErrorCode::BindingIncomplete: return "BindingIncomplete";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InvalidMutation: return "InvalidMutation";
    case ErrorCode::NoApplicableOperator: return "NoApplicableOperator";
    case ErrorCode::NoValidMutants: return "NoValidMutants";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::LlmOutputInvalid: return "LlmOutputInvalid";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::FixtureMissing: return "FixtureMissing";
    case ErrorCode::UnbindableSuite: return "UnbindableSuite";
  }
  return "Unknown";
}

std::string Error::describe() const {
  std::string out(to_string(code_));
  out += ": ";
  out += what();
  if (!location_.empty()) {
    out += " (at ";
    out += location_;
    out += ")";
  }
  return out;
}

}  // namespace optmut
