#include "elicit/traits.hpp"

#include <array>
#include <string>

#include "elicit/error.hpp"

namespace elicit {

std::string_view trait_name(std::size_t c_id) {
  static constexpr std::array<std::string_view, kFamilySize> kNames = {
      "openness", "conscientiousness", "extroversion", "agreeableness", "neuroticism", "constant"};
  if (c_id >= kFamilySize) {
    throw Error(Errc::kUnknownTrait, "family index " + std::to_string(c_id));
  }
  return kNames[c_id];
}

double trait_score_from_markers(std::size_t c_id, const StyleMarkers& m) {
  const double denom = static_cast<double>(m.total()) + 2.0;
  switch (c_id) {
    case 0:
      return (m.boast + m.filler + 1.0) / denom;
    case 1:
      return (m.hedge + m.boast + 1.0) / denom;
    case 2:
      return (m.boast + 1.0) / denom;
    case 3:
      return (m.hedge + 1.0) / denom;
    case 4:
      return (m.hedge + m.filler + 1.0) / denom;
    case kConstantMember:
      return 1.0;
    default:
      throw Error(Errc::kUnknownTrait, "family index " + std::to_string(c_id));
  }
}

namespace {

StyleMarkers transcript_markers(const Transcript& transcript) {
  if (transcript.empty()) {
    throw Error(Errc::kEmptyTranscript, "trait scores need at least one response");
  }
  StyleMarkers total;
  for (const auto& ex : transcript) {
    total += count_markers(ex.text);
  }
  return total;
}

}  // namespace

double trait_score(std::size_t c_id, const Transcript& transcript) {
  if (c_id >= kFamilySize) {
    throw Error(Errc::kUnknownTrait, "family index " + std::to_string(c_id));
  }
  return trait_score_from_markers(c_id, transcript_markers(transcript));
}

TraitScores trait_scores(const Transcript& transcript) {
  const StyleMarkers m = transcript_markers(transcript);
  TraitScores out{};
  for (std::size_t c = 0; c < kFamilySize; ++c) {
    out[c] = trait_score_from_markers(c, m);
  }
  return out;
}

}  // namespace elicit
