#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "elicit/encoder.hpp"
#include "elicit/question_bank.hpp"

namespace elicit {

enum class ModelRole { kCritic, kPolicy };

/// Single-head scaled dot-product attention over transcript rows, mean pooled,
/// followed by a tanh MLP head. The critic squashes one output through a
/// sigmoid; the policy emits one logit per question into a masked softmax.
struct Architecture {
  ModelRole role = ModelRole::kCritic;
  std::size_t input_dim = 0;
  std::size_t hidden = 16;
  std::size_t num_questions = 0;

  std::size_t output_dim() const noexcept {
    return role == ModelRole::kCritic ? 1 : num_questions;
  }
  std::size_t parameter_count() const noexcept;
  bool operator==(const Architecture&) const = default;
};

/// Offsets of each tensor inside the flat weight vector. Matrices are row-major.
struct ParamLayout {
  std::size_t wq, wk, wv;  // input_dim x hidden
  std::size_t w1, b1;      // hidden x hidden, hidden
  std::size_t w2, b2;      // output x hidden, output
  std::size_t total;

  static ParamLayout of(const Architecture& arch) noexcept;
};

struct ModelParams {
  Architecture arch;
  std::vector<double> weights;

  bool operator==(const ModelParams&) const = default;
};

/// Same layout as the weights of the model it was computed for.
struct Gradient {
  std::vector<double> values;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  bool operator==(const AdamState&) const = default;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Plain gradient descent (p -= lr * g) instead of Adam.
  bool plain_sgd = false;

  bool operator==(const AdamConfig&) const = default;
};

/// Weights i.i.d. uniform on [-0.1, 0.1].
ModelParams init_params(const Architecture& arch, std::uint64_t seed);

AdamState make_adam_state(const ModelParams& params);

/// Critic output in (0, 1). Throws kRoleMismatch or kEmptyTranscript.
double forward_score(const ModelParams& params, const TranscriptTensor& x);

/// Raw critic output before the sigmoid.
double forward_score_logit(const ModelParams& params, const TranscriptTensor& x);

/// Distribution over all questions with exact zeros on `asked`.
/// Throws kRoleMismatch, kAllQuestionsAsked or kUnknownQuestion.
std::vector<double> forward_policy(const ModelParams& params, const TranscriptTensor& x,
                                   std::span<const QuestionId> asked);

struct CriticSample {
  TranscriptTensor x;
  double y = 0.0;
  // Added to the critic logit before the sigmoid. Lets a frozen calibration
  // correction sit on top of the network during training.
  double logit_offset = 0.0;
};

struct PolicySample {
  TranscriptTensor x;
  std::vector<QuestionId> asked;
  QuestionId chosen = 0;
  double z = 0.0;
};

/// Gradient of (1/B) sum (sigmoid(logit + offset) - y)^2.
Gradient grad_mse(const ModelParams& params, std::span<const CriticSample> batch);

/// Gradient of (1/B) sum Z * log q(chosen | x). This is the ascent direction.
Gradient grad_reinforce(const ModelParams& params, std::span<const PolicySample> batch);

/// One optimizer step moving against `grad`. Throws kShapeMismatch.
void adam_step(ModelParams& params, const Gradient& grad, AdamState& state,
               const AdamConfig& config);

}  // namespace elicit
