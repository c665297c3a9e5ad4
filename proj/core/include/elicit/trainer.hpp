#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/config.hpp"
#include "elicit/encoder.hpp"
#include "elicit/evalkit.hpp"
#include "elicit/fairness.hpp"
#include "elicit/rng.hpp"
#include "elicit/simulator.hpp"
#include "elicit/snapshot.hpp"

namespace elicit {

struct StepRecord {
  double z = 0.0;
  QuestionId question = 0;
};

struct Conversation {
  Persona persona;
  Transcript transcript;
  std::vector<StepRecord> steps;
};

/// A labeled interview kept from the last calibration pass; the first batch of
/// the next training phase starts from these.
struct StoredInterview {
  Persona persona;
  Transcript transcript;
};

struct TrainRunState {
  std::size_t epoch = 0;
  ModelSnapshot current;
  ModelSnapshot last_feasible;
  Rng rng;
  std::vector<MetricRow> history;
  std::vector<StoredInterview> fair_batch;
  std::size_t consecutive_failures = 0;
  std::uint64_t personas_drawn = 0;
  std::size_t policy_updates = 0;
  std::size_t critic_updates = 0;
};

struct CalibrationOutcome {
  std::int64_t samples = 0;
  CalibrationWeights weights;
  SolveStats solve;
  AuditReport calibration_audit;  // installed critic on the calibration set
  AuditReport test_audit;         // installed critic on the held-out batch
  double ce_before = 0.0;         // working critic before, calibration set
  double ce_after = 0.0;          // working critic after, calibration set
  std::vector<LabeledTranscript> calibration_set;
};

struct EvalResult {
  std::vector<double> predictions;  // working critic
  std::vector<double> labels;
  std::vector<double> correct;
  std::vector<double> loss_terms;   // per-sample cross-entropy + eps ||l||_1
  std::vector<double> certainties;
  AuditReport audit;  // working critic on the evaluation population
  MetricRow row;
};

struct TrainResult {
  TrainRunState state;
  std::vector<std::filesystem::path> checkpoints;
};

/// The interleaved actor-critic and multi-accuracy calibration loop.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  const TrainConfig& config() const noexcept { return config_; }
  const Simulator& simulator() const noexcept { return simulator_; }
  const Encoder& encoder() const noexcept { return encoder_; }

  TrainRunState initial_state() const;

  /// Draws the next training persona from the run RNG.
  Persona draw_persona(TrainRunState& state) const;

  /// Initial summary followed by `questions` exchanges, each chosen by
  /// rollout selection against the snapshot's working critic.
  Conversation run_conversation(const Persona& persona, const ModelSnapshot& snapshot,
                                std::size_t questions, std::uint64_t salt) const;

  /// B_fair batches of B conversations; one policy and one critic update per batch.
  void train_phase(TrainRunState& state) const;

  /// Fits calibration weights on fresh interviews, installs the corrected
  /// critic and audits it on a held-out batch. On audit failure the state is
  /// restored to the last feasible snapshot and kCalibrationFailed is thrown.
  CalibrationOutcome calibration_phase(TrainRunState& state,
                                       std::optional<double> audit_eps = std::nullopt) const;

  /// Full-length interviews of the fixed evaluation population.
  EvalResult evaluate(const ModelSnapshot& snapshot) const;

  bool calibrates_at(std::size_t epoch) const noexcept;

  /// Runs cfg.epochs epochs. With an output directory, writes metrics.csv,
  /// one checkpoint per passing calibration, final.json and final_audit.json.
  TrainResult train(const std::optional<std::filesystem::path>& out_dir = std::nullopt) const;

  /// Receives progress lines (tau, rollbacks, per-epoch summaries).
  std::function<void(std::string_view)> log;

 private:
  void emit(std::string_view line) const;
  LabeledTranscript sample_interview(TrainRunState& state, std::vector<StoredInterview>* keep) const;

  TrainConfig config_;
  Simulator simulator_;
  Encoder encoder_;
  std::vector<Persona> profile_pool_;
};

/// f* of a snapshot: the calibration weights applied to the network critic.
class WorkingCritic final : public Critic {
 public:
  WorkingCritic(const ModelSnapshot& snapshot, const Encoder& encoder)
      : network_(snapshot.critic, encoder), corrected_(network_, snapshot.calibration) {}
  WorkingCritic(const WorkingCritic&) = delete;
  WorkingCritic& operator=(const WorkingCritic&) = delete;
  double score(const Transcript& transcript) const override {
    return corrected_.score(transcript);
  }
  const Critic& network() const noexcept { return network_; }

 private:
  NetworkCritic network_;
  CorrectedCritic corrected_;
};

}  // namespace elicit
