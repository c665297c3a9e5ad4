#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "elicit/checkpoint.hpp"
#include "elicit/trainer.hpp"
#include "unit/test_support.hpp"
#include "unit/tiny_config.hpp"

namespace elicit {
namespace {

TEST(Trainer, ConversationLengthAndDeterminism) {
  const Trainer trainer(test::tiny_config());
  auto state = trainer.initial_state();
  const Persona p = trainer.draw_persona(state);
  const auto a = trainer.run_conversation(p, state.current, 2, 5);
  EXPECT_EQ(a.transcript.size(), 3u);
  EXPECT_EQ(a.steps.size(), 2u);
  EXPECT_FALSE(a.transcript[0].question.has_value());
  EXPECT_NE(a.transcript[1].question, a.transcript[2].question);
  const auto b = trainer.run_conversation(p, state.current, 2, 5);
  EXPECT_EQ(a.transcript, b.transcript);
  EXPECT_EQ(trainer.run_conversation(p, state.current, 0, 5).transcript.size(), 1u);
  EXPECT_ELICIT_ERROR(trainer.run_conversation(p, state.current, 5, 5), Errc::kConfigInvalid);
}

TEST(Trainer, InitialStateIsDeterministicAndFeasible) {
  const Trainer trainer(test::tiny_config());
  const auto a = trainer.initial_state();
  const auto b = trainer.initial_state();
  EXPECT_EQ(snapshot_bytes(a.current), snapshot_bytes(b.current));
  EXPECT_EQ(a.current, a.last_feasible);
  EXPECT_EQ(a.current.calibration.l1_norm(), 0.0);
}

TEST(Trainer, OneBatchUpdatesEachModelOnce) {
  auto cfg = test::tiny_config();
  cfg.batch_size = 1;
  cfg.fair_batches = 1;
  const Trainer trainer(cfg);
  auto state = trainer.initial_state();
  state.epoch = 1;
  const auto before = state.current;
  trainer.train_phase(state);
  EXPECT_EQ(state.policy_updates, 1u);
  EXPECT_EQ(state.critic_updates, 1u);
  EXPECT_EQ(state.current.critic_adam.step, 1u);
  EXPECT_EQ(state.current.policy_adam.step, 1u);
  EXPECT_NE(state.current.critic.weights, before.critic.weights);
}

TEST(Trainer, RegimeSchedule) {
  auto cfg = test::tiny_config();
  cfg.regime = Regime::kNever;
  EXPECT_FALSE(Trainer(cfg).calibrates_at(1));
  cfg.regime = Regime::kEvery;
  EXPECT_TRUE(Trainer(cfg).calibrates_at(7));
  cfg.regime = Regime::kOnlyFinal;
  cfg.regime_t = 3;
  EXPECT_FALSE(Trainer(cfg).calibrates_at(2));
  EXPECT_TRUE(Trainer(cfg).calibrates_at(3));
  EXPECT_FALSE(Trainer(cfg).calibrates_at(4));
  cfg.regime = Regime::kUntilT;
  EXPECT_TRUE(Trainer(cfg).calibrates_at(2));
  EXPECT_TRUE(Trainer(cfg).calibrates_at(3));
  EXPECT_FALSE(Trainer(cfg).calibrates_at(4));
}

TEST(Trainer, NeverRegimeLeavesCalibrationUntouched) {
  auto cfg = test::tiny_config();
  cfg.regime = Regime::kNever;
  const auto result = Trainer(cfg).train();
  EXPECT_EQ(result.state.current.calibration.l1_norm(), 0.0);
  for (const auto& row : result.state.history) {
    EXPECT_FALSE(row.calibration_performed);
    EXPECT_FALSE(row.rollback);
  }
}

TEST(Trainer, CalibrationPhaseReducesCrossEntropy) {
  const Trainer trainer(test::tiny_config());
  auto state = trainer.initial_state();
  state.epoch = 1;
  trainer.train_phase(state);
  std::vector<std::string> lines;
  Trainer logged(test::tiny_config());
  logged.log = [&](std::string_view l) { lines.emplace_back(l); };
  try {
    const auto out = logged.calibration_phase(state);
    EXPECT_LE(out.ce_after, out.ce_before + 1e-12);
    EXPECT_EQ(out.calibration_set.size(), 40u);
    EXPECT_EQ(state.current, state.last_feasible);
    EXPECT_EQ(state.fair_batch.size(), 2u);
    EXPECT_EQ(state.current.latest_step.l, out.weights.l);
  } catch (const Error& e) {
    ASSERT_EQ(e.code(), Errc::kCalibrationFailed);
  }
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines.front(), "epoch 1: calibration tau = 40");
}

TEST(Trainer, FailedAuditRestoresLastFeasibleBytes) {
  const Trainer trainer(test::tiny_config());
  auto state = trainer.initial_state();
  state.epoch = 1;
  trainer.train_phase(state);
  state.last_feasible = state.current;
  const auto expected = snapshot_bytes(state.last_feasible);
  EXPECT_ELICIT_ERROR(trainer.calibration_phase(state, 0.0), Errc::kCalibrationFailed);
  EXPECT_EQ(snapshot_bytes(state.current), expected);
  EXPECT_EQ(state.consecutive_failures, 1u);
}

TEST(Trainer, ZeroEpochsWritesOnlyHeader) {
  auto cfg = test::tiny_config();
  cfg.epochs = 0;
  test::TempDir dir("zero_epochs");
  const auto result = Trainer(cfg).train(dir.path());
  EXPECT_TRUE(result.state.history.empty());
  std::ifstream in(dir.path() / "metrics.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(),
            "epoch,regime,accuracy,accuracy_loss,fairness_loss,sup_abs,mean_Z,"
            "calibration_performed,rollback\n");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "final.json"));
}

TEST(Trainer, TrainWritesArtifactsAndIsReproducible) {
  test::TempDir a("train_a");
  test::TempDir b("train_b");
  const auto ra = Trainer(test::tiny_config()).train(a.path());
  Trainer(test::tiny_config()).train(b.path());
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(read(a.path() / "metrics.csv"), read(b.path() / "metrics.csv"));
  EXPECT_EQ(read(a.path() / "final.json"), read(b.path() / "final.json"));
  EXPECT_EQ(ra.state.history.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(a.path() / "final_audit.json"));
  const auto loaded = load_checkpoint(a.path() / "final.json");
  EXPECT_EQ(loaded.snapshot, ra.state.current);
}

TEST(Trainer, EvaluateFillsPerSampleVectors) {
  const Trainer trainer(test::tiny_config());
  const auto state = trainer.initial_state();
  const auto ev = trainer.evaluate(state.current);
  EXPECT_EQ(ev.predictions.size(), 12u);
  EXPECT_EQ(ev.labels.size(), 12u);
  EXPECT_EQ(ev.certainties.size(), 12u);
  EXPECT_EQ(ev.row.samples, 12u);
  EXPECT_GE(ev.row.accuracy, 0.0);
  EXPECT_LE(ev.row.accuracy, 1.0);
  EXPECT_LE(ev.row.accuracy_ci.low, ev.row.accuracy);
  EXPECT_GE(ev.row.accuracy_ci.high, ev.row.accuracy);
}

}  // namespace
}  // namespace elicit
