#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elicit {

/// Failure categories raised by the toolkit. Each maps to one named error
/// condition of a public operation.
enum class Errc {
  kMalformedBank,
  kUnknownQuestion,
  kEmptyTranscript,
  kUnknownTrait,
  kRoleMismatch,
  kAllQuestionsAsked,
  kChosenQuestionMasked,
  kShapeMismatch,
  kQuestionExhausted,
  kEmptyData,
  kSolverDiverged,
  kCalibrationFailed,
  kConfigInvalid,
  kIoFailure,
  kMalformedPersonaFile,
  kMalformedCheckpoint,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace elicit
