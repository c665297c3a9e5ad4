#include "elicit/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elicit/error.hpp"

namespace elicit {

void RolloutConfig::validate(std::size_t bank_size) const {
  if (candidates < 1 || candidates > bank_size) {
    throw Error(Errc::kConfigInvalid, "rollout candidates must lie in [1, |Q|]");
  }
  if (depth < 1) {
    throw Error(Errc::kConfigInvalid, "rollout depth must be at least 1");
  }
  if (max_questions > bank_size) {
    throw Error(Errc::kConfigInvalid, "max_questions exceeds the bank size");
  }
}

double certainty(double f_value) { return 2.0 * std::abs(f_value - 0.5); }

QuestionId sample_next(const Transcript& transcript, const Policy& policy,
                       std::size_t bank_size, Rng& rng) {
  const auto asked = asked_questions(transcript);
  const auto probs = policy.distribution(transcript, asked);
  if (probs.size() != bank_size) {
    throw Error(Errc::kShapeMismatch, "policy distribution does not cover the bank");
  }
  return sample_discrete(rng, probs);
}

double rollout_certainty(const Transcript& transcript, const QuestionSpec& candidate,
                         const RolloutConfig& config, const Critic& critic,
                         const Policy& policy, const Respondent& respondent,
                         const QuestionBank& bank, Rng& rng) {
  const auto asked = asked_questions(transcript);
  if (std::find(asked.begin(), asked.end(), candidate.id) != asked.end()) {
    throw Error(Errc::kChosenQuestionMasked,
                "candidate " + std::to_string(candidate.id) + " was already asked");
  }
  Transcript x = transcript;
  x.push_back({candidate.id, respondent.respond(candidate, x).text});
  for (std::size_t step = 1; step < config.depth; ++step) {
    if (asked_questions(x).size() >= bank.size()) {
      throw Error(Errc::kQuestionExhausted, "rollout ran out of unasked questions");
    }
    const QuestionId q = sample_next(x, policy, bank.size(), rng);
    const auto& spec = bank.question(q);
    x.push_back({q, respondent.respond(spec, x).text});
  }
  return certainty(critic.score(x));
}

Selection select_next(const Transcript& transcript, const RolloutConfig& config,
                      const Critic& critic, const Policy& policy,
                      const Respondent& respondent, const QuestionBank& bank,
                      std::uint64_t salt) {
  const auto asked = asked_questions(transcript);
  std::vector<bool> taken(bank.size(), false);
  for (QuestionId q : asked) {
    if (q < taken.size()) {
      taken[q] = true;
    }
  }
  std::vector<QuestionId> open;
  for (QuestionId q = 0; q < bank.size(); ++q) {
    if (!taken[q]) {
      open.push_back(q);
    }
  }
  if (open.empty()) {
    throw Error(Errc::kAllQuestionsAsked, "every question has already been asked");
  }
  const auto probs = policy.distribution(transcript, asked);
  std::stable_sort(open.begin(), open.end(),
                   [&](QuestionId a, QuestionId b) { return probs[a] > probs[b]; });
  open.resize(std::min(open.size(), config.candidates));

  Selection best{-1.0, 0};
  for (QuestionId q : open) {
    Rng rng(derive_seed({respondent.stream_seed(), salt, transcript.size(), q}));
    const double z =
        rollout_certainty(transcript, bank.question(q), config, critic, policy, respondent,
                          bank, rng);
    if (z > best.z || (z == best.z && q < best.question)) {
      best = {z, q};
    }
  }
  return best;
}

}  // namespace elicit
