#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elicit/encoder.hpp"
#include "elicit/nnet.hpp"
#include "elicit/simulator.hpp"
#include "elicit/transcript.hpp"

namespace elicit {

/// Maps a transcript to a score in [0, 1].
class Critic {
 public:
  virtual ~Critic() = default;
  virtual double score(const Transcript& transcript) const = 0;
};

/// Maps a transcript to a distribution over the bank, zero on asked questions.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<double> distribution(const Transcript& transcript,
                                           std::span<const QuestionId> asked) const = 0;
};

/// Produces answers for rollouts and live steps.
class Respondent {
 public:
  virtual ~Respondent() = default;
  virtual Response respond(const QuestionSpec& question, const Transcript& history) const = 0;
  /// Root of the rollout RNG streams for this respondent.
  virtual std::uint64_t stream_seed() const = 0;
};

class NetworkCritic final : public Critic {
 public:
  NetworkCritic(const ModelParams& params, const Encoder& encoder)
      : params_(params), encoder_(encoder) {}
  double score(const Transcript& transcript) const override;

 private:
  const ModelParams& params_;
  const Encoder& encoder_;
};

class NetworkPolicy final : public Policy {
 public:
  NetworkPolicy(const ModelParams& params, const Encoder& encoder)
      : params_(params), encoder_(encoder) {}
  std::vector<double> distribution(const Transcript& transcript,
                                   std::span<const QuestionId> asked) const override;

 private:
  const ModelParams& params_;
  const Encoder& encoder_;
};

class SimulatedRespondent final : public Respondent {
 public:
  SimulatedRespondent(const Simulator& simulator, const Persona& persona)
      : simulator_(simulator), persona_(persona) {}
  Response respond(const QuestionSpec& question, const Transcript& history) const override {
    return simulator_.respond(persona_, question, history);
  }
  std::uint64_t stream_seed() const override { return persona_.seed; }

 private:
  const Simulator& simulator_;
  const Persona& persona_;
};

}  // namespace elicit
