#include "namegender/error.hpp"

namespace namegender {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IncompatiblePair: return "IncompatiblePair";
    case ErrorCode::WrongModelKind: return "WrongModelKind";
    case ErrorCode::UnknownConfigKey: return "UnknownConfigKey";
    case ErrorCode::EmptyAfterNormalization: return "EmptyAfterNormalization";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownGenderLabel: return "UnknownGenderLabel";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NegativeFeatureValue: return "NegativeFeatureValue";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::UnknownCharacter: return "UnknownCharacter";
    case ErrorCode::IndexOutOfVocabulary: return "IndexOutOfVocabulary";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::MalformedArtifact: return "MalformedArtifact";
    case ErrorCode::Io: return "Io";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::NonConvergence: return "NonConvergence";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace namegender
