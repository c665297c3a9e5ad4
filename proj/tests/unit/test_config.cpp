#include <json.hpp>

#include <gtest/gtest.h>

#include "elicit/config.hpp"
#include "unit/test_support.hpp"

namespace elicit {
namespace {

TEST(Config, RegimeNamesRoundTrip) {
  for (Regime r : {Regime::kEvery, Regime::kNever, Regime::kOnlyFinal, Regime::kUntilT}) {
    EXPECT_EQ(parse_regime(regime_name(r)), r);
  }
  EXPECT_EQ(parse_regime("ONLY_FINAL"), Regime::kOnlyFinal);
  EXPECT_EQ(parse_regime("until_t"), Regime::kUntilT);
  EXPECT_ELICIT_ERROR(parse_regime("sometimes"), Errc::kConfigInvalid);
}

TEST(Config, ProfilesDiffer) {
  const auto desk = desk_profile();
  const auto paper = paper_profile();
  EXPECT_EQ(desk.eps, 0.1);
  EXPECT_EQ(paper.eps, 0.01);
  EXPECT_EQ(paper.batch_size, 8u);
  EXPECT_EQ(paper.fair_batches, 4u);
  EXPECT_EQ(paper.rollout.max_questions, 2u);
  EXPECT_EQ(paper.rollout.depth, 2u);
  EXPECT_EQ(paper.epochs, 100u);
  EXPECT_EQ(desk.calibration_sample_count(), 1561);
  EXPECT_NO_THROW(desk.validate());
  EXPECT_NO_THROW(paper.validate());
  EXPECT_EQ(profile_by_name("paper"), paper);
  EXPECT_ELICIT_ERROR(profile_by_name("laptop"), Errc::kConfigInvalid);
}

TEST(Config, JsonRoundTrip) {
  auto cfg = desk_profile();
  cfg.seed = 1234567890123ULL;
  cfg.regime = Regime::kUntilT;
  cfg.regime_t = 7;
  cfg.solver.tolerance = 3.5e-7;
  cfg.critic_optimizer.plain_sgd = true;
  cfg.simulator.unprompted_target = false;
  cfg.bank = QuestionBank({"a", "b", "c"}, "b");
  cfg.rollout = {2, 1, 3};
  const auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(back, cfg);
}

TEST(Config, PartialJsonStartsFromNamedProfile) {
  const auto cfg = config_from_json(R"({"profile": "paper", "epochs": 3})");
  auto expected = paper_profile();
  expected.epochs = 3;
  EXPECT_EQ(cfg, expected);
}

TEST(Config, UnknownKeysAndBadValuesRejected) {
  EXPECT_ELICIT_ERROR(config_from_json(R"({"epochz": 3})"), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR(config_from_json(R"({"rollout": {"width": 3}})"), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR(config_from_json(R"({"regime": "sometimes"})"), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR(config_from_json("not json"), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR(config_from_json(R"({"epochs": "many"})"), Errc::kConfigInvalid);
}

TEST(Config, Overrides) {
  const auto cfg = apply_overrides(desk_profile(), {"rollout.candidates=2", "eps=0.05",
                                                     "regime=never", "solver.max_iterations=17"});
  EXPECT_EQ(cfg.rollout.candidates, 2u);
  EXPECT_EQ(cfg.eps, 0.05);
  EXPECT_EQ(cfg.regime, Regime::kNever);
  EXPECT_EQ(cfg.solver.max_iterations, 17u);
  EXPECT_ELICIT_ERROR(apply_overrides(desk_profile(), {"rollout.width=2"}), Errc::kConfigInvalid);
  EXPECT_ELICIT_ERROR(apply_overrides(desk_profile(), {"eps"}), Errc::kConfigInvalid);
}

TEST(Config, ValidateCatchesBadSettings) {
  auto bad = [](auto mutate) {
    auto cfg = desk_profile();
    mutate(cfg);
    EXPECT_ELICIT_ERROR(cfg.validate(), Errc::kConfigInvalid);
  };
  bad([](TrainConfig& c) { c.eps = 0; });
  bad([](TrainConfig& c) { c.delta = 1; });
  bad([](TrainConfig& c) { c.batch_size = 0; });
  bad([](TrainConfig& c) { c.fair_batches = 0; });
  bad([](TrainConfig& c) { c.rollout.candidates = 31; });
  bad([](TrainConfig& c) { c.rollout.max_questions = 0; });
  bad([](TrainConfig& c) { c.prevalence = 1.5; });
  bad([](TrainConfig& c) { c.regime = Regime::kOnlyFinal; c.regime_t = 0; });
}

TEST(Config, ExplicitCalibrationSampleCount) {
  auto cfg = desk_profile();
  cfg.calibration_samples = 64;
  EXPECT_EQ(cfg.calibration_sample_count(), 64);
  EXPECT_EQ(cfg.audit_batch_size(), cfg.fair_batches * cfg.batch_size);
  cfg.audit_batch = 5;
  EXPECT_EQ(cfg.audit_batch_size(), 5u);
}

}  // namespace
}  // namespace elicit
