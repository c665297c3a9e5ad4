#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "elicit/transcript.hpp"
#include "elicit/vocabulary.hpp"

namespace elicit {

/// Distinguishing family: five Big-5 style scorers followed by the constant 1.
inline constexpr std::size_t kFamilySize = 6;
inline constexpr std::size_t kConstantMember = 5;

using TraitScores = std::array<double, kFamilySize>;

std::string_view trait_name(std::size_t c_id);

/// Laplace-smoothed marker ratios over the summed style markers of a
/// transcript; every trait is exactly 0.5 when no markers are present.
///   O = (boast + filler + 1) / (T + 2)
///   C = (hedge + boast + 1) / (T + 2)
///   E = (boast + 1) / (T + 2)
///   A = (hedge + 1) / (T + 2)
///   N = (hedge + filler + 1) / (T + 2)
double trait_score_from_markers(std::size_t c_id, const StyleMarkers& markers);

/// Throws kUnknownTrait or kEmptyTranscript.
double trait_score(std::size_t c_id, const Transcript& transcript);

TraitScores trait_scores(const Transcript& transcript);

}  // namespace elicit
