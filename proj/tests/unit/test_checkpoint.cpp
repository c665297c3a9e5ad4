#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "elicit/checkpoint.hpp"
#include "elicit/rng.hpp"
#include "unit/test_support.hpp"

namespace elicit {
namespace {

TEST(Checkpoint, HexDoubleRoundTripIsBitExact) {
  const double values[] = {0.0, -0.0, 1.0, -1.5, 1e-300, 5e-324,
                           std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::quiet_NaN(), 0.1};
  for (double v : values) {
    const auto text = hex_double(v);
    EXPECT_EQ(text.size(), 16u);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(parse_hex_double(text)), std::bit_cast<std::uint64_t>(v));
  }
  EXPECT_EQ(hex_double(1.0), "3ff0000000000000");
}

TEST(Checkpoint, HexDoubleRejectsGarbage) {
  EXPECT_ELICIT_ERROR(parse_hex_double(""), Errc::kMalformedCheckpoint);
  EXPECT_ELICIT_ERROR(parse_hex_double("3ff00000000000zz"), Errc::kMalformedCheckpoint);
  EXPECT_ELICIT_ERROR(parse_hex_double("3ff0"), Errc::kMalformedCheckpoint);
}

Checkpoint make_checkpoint() {
  Checkpoint cp;
  cp.config = desk_profile();
  cp.config.seed = 99;
  cp.epoch = 12;
  const Architecture critic{ModelRole::kCritic, 62, 16, 30};
  const Architecture policy{ModelRole::kPolicy, 62, 16, 30};
  cp.snapshot.critic = init_params(critic, 1);
  cp.snapshot.policy = init_params(policy, 2);
  cp.snapshot.critic_adam = make_adam_state(cp.snapshot.critic);
  cp.snapshot.policy_adam = make_adam_state(cp.snapshot.policy);
  cp.snapshot.critic_adam.m[3] = 1.0 / 3.0;
  cp.snapshot.policy_adam.step = 7;
  cp.snapshot.calibration.l[2] = -0.123456789012345678;
  cp.snapshot.calibration.eps = 0.1;
  cp.snapshot.latest_step.l[5] = 1e-17;
  Rng rng(5);
  rng();
  cp.rng_state = rng_state(rng);
  return cp;
}

TEST(Checkpoint, JsonRoundTripIsBitExact) {
  const auto cp = make_checkpoint();
  const auto back = checkpoint_from_json(checkpoint_to_json(cp));
  EXPECT_EQ(back.snapshot, cp.snapshot);
  EXPECT_EQ(snapshot_bytes(back.snapshot), snapshot_bytes(cp.snapshot));
  EXPECT_EQ(back.config, cp.config);
  EXPECT_EQ(back.epoch, cp.epoch);
  EXPECT_EQ(back.rng_state, cp.rng_state);
}

TEST(Checkpoint, SnapshotBytesDetectLastBitChanges) {
  auto cp = make_checkpoint();
  const auto before = snapshot_bytes(cp.snapshot);
  cp.snapshot.critic.weights[0] = std::nextafter(cp.snapshot.critic.weights[0], 1.0);
  EXPECT_NE(snapshot_bytes(cp.snapshot), before);
}

TEST(Checkpoint, FileRoundTrip) {
  test::TempDir dir("ckpt");
  const auto cp = make_checkpoint();
  save_checkpoint(dir.path() / "a.json", cp);
  EXPECT_EQ(load_checkpoint(dir.path() / "a.json").snapshot, cp.snapshot);
  EXPECT_ELICIT_ERROR(load_checkpoint(dir.path() / "missing.json"), Errc::kIoFailure);
}

TEST(Checkpoint, MalformedInputs) {
  EXPECT_ELICIT_ERROR(checkpoint_from_json("{"), Errc::kMalformedCheckpoint);
  EXPECT_ELICIT_ERROR(checkpoint_from_json("{}"), Errc::kMalformedCheckpoint);
  auto text = checkpoint_to_json(make_checkpoint());
  const auto pos = text.find("\"format\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 11, "\"format\": 9");
  EXPECT_ELICIT_ERROR(checkpoint_from_json(text), Errc::kMalformedCheckpoint);
}

}  // namespace
}  // namespace elicit
