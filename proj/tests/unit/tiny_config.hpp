#pragma once

#include "elicit/config.hpp"

namespace elicit::test {

// Small enough that a full epoch takes milliseconds.
inline TrainConfig tiny_config() {
  TrainConfig c = desk_profile();
  c.profile = "desk";
  c.bank = QuestionBank({"sales", "leadership", "teamwork", "python"}, "leadership");
  c.hidden = 6;
  c.batch_size = 2;
  c.fair_batches = 2;
  c.rollout = {2, 1, 2};
  c.eps = 0.2;
  c.calibration_samples = 40;
  c.eval_size = 12;
  c.epochs = 2;
  c.seed = 11;
  return c;
}

}  // namespace elicit::test
