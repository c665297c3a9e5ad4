#include "elicit/models.hpp"

namespace elicit {

double NetworkCritic::score(const Transcript& transcript) const {
  return forward_score(params_, encoder_.tensorize(transcript));
}

std::vector<double> NetworkPolicy::distribution(const Transcript& transcript,
                                                std::span<const QuestionId> asked) const {
  return forward_policy(params_, encoder_.tensorize(transcript), asked);
}

}  // namespace elicit
