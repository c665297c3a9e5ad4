#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "elicit/question_bank.hpp"
#include "elicit/transcript.hpp"

namespace elicit {

inline constexpr std::size_t kDefaultEmbeddingDim = 32;
inline constexpr std::size_t kMarkerFeatures = 3;
inline constexpr std::size_t kSkillFeatures = 5;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

struct Embedding {
  std::vector<double> values;
};

/// Row-major matrix, one row per exchange: one-hot(question) followed by the
/// response embedding.
struct TranscriptTensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  bool operator==(const TranscriptTensor&) const = default;
};

/// Deterministic feature map standing in for a pretrained sentence encoder.
///
/// Layout of an embedding of dimension d:
///   [0, d-8)    hashed bag-of-tokens counts, each count scaled by 1/4
///   [d-8, d-5)  hedge, boast and filler counts, each scaled by 1/4
///   [d-5, d)    skill indicators: affirmed skill present, hypothetical skill
///               present, target stated as held, target stated hypothetically,
///               distinct skills mentioned / 10
///
/// Multi-word skills from the bank are merged into single tokens
/// ("customer service" -> "customer_service") by greedy longest match.
class Encoder {
 public:
  explicit Encoder(const QuestionBank& bank, std::size_t dim = kDefaultEmbeddingDim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_questions() const noexcept { return num_questions_; }
  std::size_t row_width() const noexcept { return dim_ + num_questions_; }
  std::size_t bucket_count() const noexcept { return dim_ - kMarkerFeatures - kSkillFeatures; }

  std::vector<std::string> tokenize(std::string_view text) const;

  /// Skill tokens (underscore form) appearing in the text.
  std::vector<std::string> mentioned_skills(std::string_view text) const;

  Embedding embed(std::string_view text) const;

  /// Throws kEmptyTranscript, or kUnknownQuestion for an id outside the bank.
  TranscriptTensor tensorize(const Transcript& transcript) const;

  static std::string skill_token(std::string_view skill);

 private:
  std::size_t dim_;
  std::size_t num_questions_;
  std::string target_token_;
  // First word -> candidate phrases (as word lists), longest first.
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> phrases_;
  std::vector<std::string> skill_tokens_;
};

}  // namespace elicit
