#pragma once

#include <string>

#include "elicit/fairness.hpp"
#include "elicit/nnet.hpp"

namespace elicit {

/// Everything the rollback rule restores: both networks, their optimizer
/// state and the installed calibration weights.
struct ModelSnapshot {
  ModelParams critic;
  AdamState critic_adam;
  ModelParams policy;
  AdamState policy_adam;
  CalibrationWeights calibration;
  // The most recent correction step. Each calibration corrects the previous
  // working critic, so `calibration` is the running sum of all steps.
  CalibrationWeights latest_step;

  bool operator==(const ModelSnapshot&) const = default;
};

/// Canonical serialization; equal bytes iff bit-identical snapshots.
std::string snapshot_bytes(const ModelSnapshot& snapshot);

}  // namespace elicit
