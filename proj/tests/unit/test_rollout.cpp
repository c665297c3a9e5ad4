#include <algorithm>
#include <map>

#include <gtest/gtest.h>

#include "elicit/rollout.hpp"
#include "unit/test_support.hpp"

namespace elicit {
namespace {

// Score depends only on the sequence of questions asked.
class LookupCritic final : public Critic {
 public:
  std::map<std::vector<QuestionId>, double> table;
  double fallback = 0.5;
  double score(const Transcript& x) const override {
    const auto it = table.find(asked_questions(x));
    return it == table.end() ? fallback : it->second;
  }
};

// Fixed preference order; all mass on the first unasked entry.
class OrderPolicy final : public Policy {
 public:
  std::vector<QuestionId> order;
  std::size_t size = 3;
  std::vector<double> distribution(const Transcript&,
                                   std::span<const QuestionId> asked) const override {
    std::vector<double> d(size, 0.0);
    for (QuestionId q : order) {
      if (std::find(asked.begin(), asked.end(), q) == asked.end()) {
        d[q] = 1.0;
        return d;
      }
    }
    throw Error(Errc::kAllQuestionsAsked, "none left");
  }
};

// Fixed weights, renormalized over unasked entries.
class WeightPolicy final : public Policy {
 public:
  std::vector<double> weights;
  std::vector<double> distribution(const Transcript&,
                                   std::span<const QuestionId> asked) const override {
    auto d = weights;
    for (QuestionId q : asked) d[q] = 0.0;
    double s = 0;
    for (double v : d) s += v;
    for (double& v : d) v /= s;
    return d;
  }
};

class EchoRespondent final : public Respondent {
 public:
  Response respond(const QuestionSpec& q, const Transcript& history) const override {
    Response r;
    r.text = "answer " + std::to_string(q.id) + " after " + std::to_string(history.size());
    return r;
  }
  std::uint64_t stream_seed() const override { return 17; }
};

QuestionBank three_bank() { return QuestionBank({"sales", "leadership", "teamwork"}, "leadership"); }

const Transcript kStart{{std::nullopt, "hello"}};

TEST(Rollout, Certainty) {
  EXPECT_EQ(certainty(0.5), 0.0);
  EXPECT_EQ(certainty(1.0), 1.0);
  EXPECT_EQ(certainty(0.0), 1.0);
  EXPECT_DOUBLE_EQ(certainty(0.8), 0.6);
}

TEST(Rollout, TwoStepTraceMatchesHandSimulation) {
  const auto bank = three_bank();
  LookupCritic critic;
  critic.table[{1, 2}] = 0.9;
  critic.table[{1, 0}] = 0.1;
  OrderPolicy policy;
  policy.order = {2, 0, 1};
  EchoRespondent respondent;
  RolloutConfig cfg{3, 2, 2};
  Rng rng(0);
  // Ask 1, then the policy's first unasked pick is 2: Z = 2|0.9 - 0.5|.
  EXPECT_DOUBLE_EQ(
      rollout_certainty(kStart, bank.question(1), cfg, critic, policy, respondent, bank, rng),
      0.8);
  policy.order = {0, 2, 1};
  critic.table[{1, 0}] = 0.35;
  EXPECT_DOUBLE_EQ(
      rollout_certainty(kStart, bank.question(1), cfg, critic, policy, respondent, bank, rng),
      0.3);
}

TEST(Rollout, RolloutDoesNotMutateInputs) {
  const auto bank = three_bank();
  LookupCritic critic;
  OrderPolicy policy;
  policy.order = {0, 1, 2};
  EchoRespondent respondent;
  Transcript x = kStart;
  const Transcript copy = x;
  Rng rng(1);
  rollout_certainty(x, bank.question(2), {3, 2, 2}, critic, policy, respondent, bank, rng);
  EXPECT_EQ(x, copy);
}

TEST(Rollout, ExhaustionAndMaskedCandidates) {
  const auto bank = three_bank();
  LookupCritic critic;
  OrderPolicy policy;
  policy.order = {0, 1, 2};
  EchoRespondent respondent;
  const Transcript x{{std::nullopt, "hi"}, {0, "a"}, {1, "b"}};
  Rng rng(2);
  EXPECT_ELICIT_ERROR(
      rollout_certainty(x, bank.question(2), {3, 2, 3}, critic, policy, respondent, bank, rng),
      Errc::kQuestionExhausted);
  EXPECT_ELICIT_ERROR(
      rollout_certainty(x, bank.question(0), {3, 1, 3}, critic, policy, respondent, bank, rng),
      Errc::kChosenQuestionMasked);
  const Transcript full{{std::nullopt, "hi"}, {0, "a"}, {1, "b"}, {2, "c"}};
  EXPECT_ELICIT_ERROR(select_next(full, {3, 1, 3}, critic, policy, respondent, bank, 0),
                      Errc::kAllQuestionsAsked);
}

TEST(Rollout, SingleCandidateIsPolicyTop) {
  const auto bank = three_bank();
  LookupCritic critic;
  critic.table[{0}] = 0.9;
  critic.table[{2}] = 0.6;
  WeightPolicy policy;
  policy.weights = {0.2, 0.3, 0.5};
  EchoRespondent respondent;
  const auto sel = select_next(kStart, {1, 1, 2}, critic, policy, respondent, bank, 0);
  EXPECT_EQ(sel.question, 2u);
  EXPECT_DOUBLE_EQ(sel.z, 0.2);
}

TEST(Rollout, FullWidthMatchesExhaustiveEnumeration) {
  const auto bank = three_bank();
  LookupCritic critic;
  critic.table[{0}] = 0.45;
  critic.table[{1}] = 0.05;
  critic.table[{2}] = 0.9;
  WeightPolicy policy;
  policy.weights = {0.5, 0.3, 0.2};
  EchoRespondent respondent;
  const auto sel = select_next(kStart, {3, 1, 2}, critic, policy, respondent, bank, 0);
  EXPECT_EQ(sel.question, 1u);
  EXPECT_DOUBLE_EQ(sel.z, 0.9);
}

TEST(Rollout, TiesGoToLowerId) {
  const auto bank = three_bank();
  LookupCritic critic;
  critic.table[{0}] = 0.5;
  critic.table[{1}] = 0.8;
  critic.table[{2}] = 0.2;
  WeightPolicy policy;
  policy.weights = {0.1, 0.2, 0.7};
  EchoRespondent respondent;
  const auto sel = select_next(kStart, {3, 1, 2}, critic, policy, respondent, bank, 0);
  EXPECT_EQ(sel.question, 1u);
  EXPECT_NEAR(sel.z, 0.6, 1e-15);
}

TEST(Rollout, SampleNextFollowsPolicy) {
  WeightPolicy policy;
  policy.weights = {0.0, 1.0, 0.0};
  Rng rng(3);
  EXPECT_EQ(sample_next(kStart, policy, 3, rng), 1u);
}

TEST(Rollout, ConfigValidation) {
  EXPECT_NO_THROW((RolloutConfig{3, 1, 3}.validate(3)));
  EXPECT_ELICIT_ERROR((RolloutConfig{0, 1, 1}.validate(3)), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR((RolloutConfig{4, 1, 1}.validate(3)), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR((RolloutConfig{1, 0, 1}.validate(3)), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR((RolloutConfig{1, 1, 4}.validate(3)), Errc::kConfigInvalid);
}

}  // namespace
}  // namespace elicit
