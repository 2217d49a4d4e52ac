#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace namegender {

enum class ErrorCode {
  // usage
  InvalidArgument,
  IncompatiblePair,
  WrongModelKind,
  UnknownConfigKey,
  // data
  EmptyAfterNormalization,
  MalformedRow,
  UnknownGenderLabel,
  TooFewSamples,
  InvalidFraction,
  InvalidN,
  EmptyInput,
  NegativeFeatureValue,
  LabelMismatch,
  TooLong,
  UnknownCharacter,
  IndexOutOfVocabulary,
  WidthMismatch,
  LengthMismatch,
  ShapeMismatch,
  NonFiniteInput,
  VersionMismatch,
  MalformedArtifact,
  Io,
  // training
  SingleClassInput,
  NonConvergence,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace namegender
