#include "elicit/error.hpp"

#include "elicit/transcript.hpp"

namespace elicit {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedBank: return "MalformedBank";
    case Errc::kUnknownQuestion: return "UnknownQuestion";
    case Errc::kEmptyTranscript: return "EmptyTranscript";
    case Errc::kUnknownTrait: return "UnknownTrait";
    case Errc::kRoleMismatch: return "RoleMismatch";
    case Errc::kAllQuestionsAsked: return "AllQuestionsAsked";
    case Errc::kChosenQuestionMasked: return "ChosenQuestionMasked";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kQuestionExhausted: return "QuestionExhausted";
    case Errc::kEmptyData: return "EmptyData";
    case Errc::kSolverDiverged: return "SolverDiverged";
    case Errc::kCalibrationFailed: return "CalibrationFailed";
    case Errc::kConfigInvalid: return "ConfigInvalid";
    case Errc::kIoFailure: return "IoFailure";
    case Errc::kMalformedPersonaFile: return "MalformedPersonaFile";
    case Errc::kMalformedCheckpoint: return "MalformedCheckpoint";
  }
  return "Unknown";
}

std::vector<QuestionId> asked_questions(const Transcript& transcript) {
  std::vector<QuestionId> ids;
  for (const auto& e : transcript) {
    if (e.question) {
      ids.push_back(*e.question);
    }
  }
  return ids;
}

}  // namespace elicit
