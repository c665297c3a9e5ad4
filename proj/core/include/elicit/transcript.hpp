#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elicit/question_bank.hpp"

namespace elicit {

/// One question/response pair. The opening self-description has no question.
struct Exchange {
  std::optional<QuestionId> question;
  std::string text;

  bool operator==(const Exchange&) const = default;
};

using Transcript = std::vector<Exchange>;

/// Question ids asked so far, in transcript order.
std::vector<QuestionId> asked_questions(const Transcript& transcript);

struct LabeledTranscript {
  Transcript transcript;
  int label = 0;
};

}  // namespace elicit
