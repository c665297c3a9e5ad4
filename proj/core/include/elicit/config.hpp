#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/fairness.hpp"
#include "elicit/nnet.hpp"
#include "elicit/question_bank.hpp"
#include "elicit/rollout.hpp"
#include "elicit/simulator.hpp"

namespace elicit {

/// Fairness-correction schedules compared in the evaluation figures.
enum class Regime {
  kEvery,      // calibrate after every epoch
  kNever,      // never calibrate
  kOnlyFinal,  // calibrate once, at epoch t
  kUntilT,     // calibrate after every epoch up to and including t
};

std::string_view regime_name(Regime regime);
/// Accepts every, never, only-final, until-t (and underscore spellings).
Regime parse_regime(std::string_view text);

struct TrainConfig {
  std::string profile = "desk";
  QuestionBank bank = QuestionBank::default_bank();
  SimulatorConfig simulator;
  double prevalence = 0.2;

  std::size_t embedding_dim = kDefaultEmbeddingDim;
  std::size_t hidden = 16;

  std::size_t batch_size = 8;    // B
  std::size_t fair_batches = 4;  // B_fair: batches between calibrations
  RolloutConfig rollout;

  double eps = 0.1;
  double delta = 1e-6;
  std::size_t epochs = 100;

  AdamConfig critic_optimizer;
  AdamConfig policy_optimizer;
  SolverConfig solver;

  Regime regime = Regime::kEvery;
  std::size_t regime_t = 0;

  // Held-out personas evaluated at full interview length after each epoch.
  std::size_t eval_size = 256;
  // Calibration samples per pass; 0 means the generalization threshold.
  std::int64_t calibration_samples = 0;
  // Audit batch after calibration; 0 means B_fair * B.
  std::size_t audit_batch = 0;
  std::size_t max_consecutive_failures = 25;

  std::uint64_t seed = 1;
  // Optional structured-profile file; when set, half of the sampled personas
  // are drawn from it.
  std::string profile_file;

  /// Throws kConfigInvalid.
  void validate() const;

  std::int64_t calibration_sample_count() const;
  std::size_t audit_batch_size() const noexcept {
    return audit_batch != 0 ? audit_batch : fair_batches * batch_size;
  }
  bool operator==(const TrainConfig&) const = default;
};

/// Desk-scale defaults: eps = 0.1 so a calibration pass needs 1,561 samples.
TrainConfig desk_profile();
/// Published protocol: eps = 0.01, B = 8, calibration every 32 conversations,
/// 2 questions with 2-step rollouts, 20% prevalence, 100 epochs.
TrainConfig paper_profile();
TrainConfig profile_by_name(std::string_view name);

std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(std::string_view json_text);

/// Applies "dotted.path=value" assignments; values are parsed as JSON when
/// possible and taken as strings otherwise. Throws kConfigInvalid.
TrainConfig apply_overrides(const TrainConfig& config, const std::vector<std::string>& assignments);

}  // namespace elicit
