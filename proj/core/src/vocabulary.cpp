#include "elicit/vocabulary.hpp"

#include <algorithm>
#include <cctype>

namespace elicit {

namespace {

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view token) noexcept {
  return std::find(set.begin(), set.end(), token) != set.end();
}

bool is_word_char(char ch) noexcept {
  const auto u = static_cast<unsigned char>(ch);
  return std::isalnum(u) || ch == '_' || ch == '\'';
}

bool is_sentence_end(char ch) noexcept {
  return ch == '.' || ch == '!' || ch == '?' || ch == ';';
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  };
  for (char ch : text) {
    if (is_word_char(ch)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else {
      flush();
      if (is_sentence_end(ch) && (words.empty() || words.back() != kSentenceEnd)) {
        words.emplace_back(kSentenceEnd);
      }
    }
  }
  flush();
  return words;
}

bool is_hedge(std::string_view token) noexcept { return contains(kHedgeTokens, token); }
bool is_boast(std::string_view token) noexcept { return contains(kBoastTokens, token); }
bool is_filler(std::string_view token) noexcept { return contains(kFillerTokens, token); }

StyleMarkers count_markers(std::string_view text) {
  StyleMarkers m;
  for (const auto& w : split_words(text)) {
    if (is_hedge(w)) {
      ++m.hedge;
    } else if (is_boast(w)) {
      ++m.boast;
    } else if (is_filler(w)) {
      ++m.filler;
    }
  }
  return m;
}

}  // namespace elicit
