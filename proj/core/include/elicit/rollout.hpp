#pragma once

#include <cstddef>
#include <cstdint>

#include "elicit/models.hpp"
#include "elicit/question_bank.hpp"
#include "elicit/rng.hpp"

namespace elicit {

struct RolloutConfig {
  std::size_t candidates = 4;     // N
  std::size_t depth = 2;          // M
  std::size_t max_questions = 2;  // i_max

  /// Throws kConfigInvalid unless 1 <= N <= |Q|, M >= 1 and i_max <= |Q|.
  void validate(std::size_t bank_size) const;
  bool operator==(const RolloutConfig&) const = default;
};

/// 2 |f - 0.5|.
double certainty(double f_value);

/// Appends `candidate` and its simulated answer, then samples depth-1 further
/// questions from the policy, and returns the certainty of the critic on the
/// final state. `transcript` is not modified.
/// Throws kQuestionExhausted if the bank runs out of unasked questions.
double rollout_certainty(const Transcript& transcript, const QuestionSpec& candidate,
                         const RolloutConfig& config, const Critic& critic,
                         const Policy& policy, const Respondent& respondent,
                         const QuestionBank& bank, Rng& rng);

struct Selection {
  double z = 0.0;
  QuestionId question = 0;
};

/// Evaluates the policy's top-N unasked questions by rollout certainty and
/// returns the best one; ties go to the lower question id. Candidate n uses
/// the stream derive_seed({respondent.stream_seed(), salt, |x|, id}).
/// Throws kAllQuestionsAsked.
Selection select_next(const Transcript& transcript, const RolloutConfig& config,
                      const Critic& critic, const Policy& policy,
                      const Respondent& respondent, const QuestionBank& bank,
                      std::uint64_t salt);

/// Samples the next question directly from the policy.
QuestionId sample_next(const Transcript& transcript, const Policy& policy,
                       std::size_t bank_size, Rng& rng);

}  // namespace elicit
