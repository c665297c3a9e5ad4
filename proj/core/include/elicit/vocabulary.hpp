#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

// Closed token sets shared by the simulator, the encoder and the trait scorers.

inline constexpr std::array<std::string_view, 5> kHedgeTokens = {
    "maybe", "perhaps", "somewhat", "possibly", "probably"};
inline constexpr std::array<std::string_view, 5> kBoastTokens = {
    "proudly", "excellent", "outstanding", "exceptional", "expert"};
inline constexpr std::array<std::string_view, 5> kFillerTokens = {
    "basically", "actually", "really", "just", "like"};

inline constexpr std::string_view kAffirmativeMarker = "already";
inline constexpr std::string_view kHypotheticalMarker = "would";
inline constexpr std::string_view kSentenceEnd = ".";

struct StyleMarkers {
  int hedge = 0;
  int boast = 0;
  int filler = 0;

  int total() const noexcept { return hedge + boast + filler; }
  StyleMarkers& operator+=(const StyleMarkers& o) noexcept {
    hedge += o.hedge;
    boast += o.boast;
    filler += o.filler;
    return *this;
  }
  bool operator==(const StyleMarkers&) const = default;
};

/// Lowercases ASCII, splits on anything that is not [a-z0-9_'] and emits "."
/// for sentence punctuation (. ! ? ;).
std::vector<std::string> split_words(std::string_view text);

StyleMarkers count_markers(std::string_view text);

bool is_hedge(std::string_view token) noexcept;
bool is_boast(std::string_view token) noexcept;
bool is_filler(std::string_view token) noexcept;

}  // namespace elicit
