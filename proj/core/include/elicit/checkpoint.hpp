#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "elicit/config.hpp"
#include "elicit/snapshot.hpp"

namespace elicit {

/// IEEE-754 bit pattern as 16 lowercase hex digits.
std::string hex_double(double value);
/// Throws kMalformedCheckpoint.
double parse_hex_double(std::string_view text);

struct Checkpoint {
  TrainConfig config;
  ModelSnapshot snapshot;
  std::string rng_state;
  std::size_t epoch = 0;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);
/// Throws kMalformedCheckpoint.
Checkpoint checkpoint_from_json(std::string_view json_text);

/// Throws kIoFailure.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws kIoFailure or kMalformedCheckpoint.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace elicit
