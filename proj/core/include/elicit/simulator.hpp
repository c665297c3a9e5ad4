#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "elicit/question_bank.hpp"
#include "elicit/transcript.hpp"
#include "elicit/vocabulary.hpp"

namespace elicit {

enum TraitIndex : std::size_t {
  kOpenness = 0,
  kConscientiousness = 1,
  kExtroversion = 2,
  kAgreeableness = 3,
  kNeuroticism = 4,
};

using TraitVector = std::array<double, 5>;

struct Persona {
  std::int64_t id = 0;
  std::set<std::string> true_skills;
  bool has_target = false;
  TraitVector traits{};
  double modesty = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const Persona&) const = default;
};

struct Response {
  std::string text;
  std::set<std::string> mentioned_skills;
  StyleMarkers style_markers;

  bool operator==(const Response&) const = default;
};

struct SimulatorConfig {
  // Strength of modesty-driven under-reporting: a held skill surfaces with
  // probability 1 - modesty * suppression_weight.
  double suppression_weight = 0.6;
  // Per-skill inclusion probability for non-target skills.
  double skill_inclusion = 0.25;
  // Multiplies the suppression applied to the affirmative answer when the
  // queried skill is held. 1 means direct questions are as biased as
  // unprompted mentions; 0 means a direct question always gets the truth.
  double direct_attenuation = 0.5;
  // When false the target skill never surfaces unless asked about directly.
  bool unprompted_target = true;
  // Upper bound on each style-marker count per response.
  int max_markers_per_kind = 2;

  bool operator==(const SimulatorConfig&) const = default;
};

/// (1 - Extroversion + Agreeableness) / 2.
double modesty_from_traits(const TraitVector& traits) noexcept;

/// Seeded stand-in for the fine-tuned respondent model. Responses are
/// slot-filled templates over a closed vocabulary; every output is a pure
/// function of (persona, question, history length).
class Simulator {
 public:
  explicit Simulator(QuestionBank bank, SimulatorConfig config = {});

  const QuestionBank& bank() const noexcept { return bank_; }
  const SimulatorConfig& config() const noexcept { return config_; }

  Persona sample_persona(std::uint64_t seed, double prevalence, std::int64_t id = 0) const;

  /// Builds a persona from explicit fields; skills outside the bank are dropped.
  Persona make_persona(std::int64_t id, const std::vector<std::string>& skills,
                       const TraitVector& traits, std::uint64_t seed) const;

  Response initial_summary(const Persona& persona) const;

  /// Counterfactual self-summary written as if the persona also held the
  /// queried skill.
  Response respond(const Persona& persona, const QuestionSpec& question,
                   const Transcript& history) const;

 private:
  Response compose(const Persona& persona, const QuestionSpec* queried,
                   std::size_t history_size) const;

  QuestionBank bank_;
  SimulatorConfig config_;
};

// Persona files: JSON lines {"id", "skills", "traits", "seed"}.
std::vector<Persona> read_persona_file(const std::filesystem::path& path,
                                       const Simulator& simulator);
void write_persona_file(const std::filesystem::path& path, const std::vector<Persona>& personas);

/// Structured-profile import (full_name, gender, industry, job_title, skills,
/// summary, ...). Unknown keys are ignored. Traits are drawn from a seed
/// derived from `seed` and the line index since profiles carry none.
std::vector<Persona> import_profiles(const std::filesystem::path& path,
                                     const Simulator& simulator, std::uint64_t seed);

}  // namespace elicit
