#include "elicit/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/vocabulary.hpp"

namespace elicit {

namespace {

constexpr double kCountScale = 0.25;

std::vector<std::string> words_of(std::string_view phrase) {
  std::vector<std::string> out;
  std::istringstream is{std::string(phrase)};
  std::string w;
  while (is >> w) {
    out.push_back(w);
  }
  return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Encoder::skill_token(std::string_view skill) {
  std::string token(skill);
  std::replace(token.begin(), token.end(), ' ', '_');
  return token;
}

Encoder::Encoder(const QuestionBank& bank, std::size_t dim)
    : dim_(dim), num_questions_(bank.size()), target_token_(skill_token(bank.target_skill())) {
  if (dim_ <= kMarkerFeatures + kSkillFeatures) {
    throw Error(Errc::kConfigInvalid, "embedding dimension must exceed 8");
  }
  for (const auto& q : bank.questions()) {
    auto words = words_of(q.skill_name);
    phrases_[words.front()].push_back(words);
    skill_tokens_.push_back(skill_token(q.skill_name));
  }
  for (auto& [first, candidates] : phrases_) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }
  std::sort(skill_tokens_.begin(), skill_tokens_.end());
}

std::vector<std::string> Encoder::tokenize(std::string_view text) const {
  const auto words = split_words(text);
  std::vector<std::string> tokens;
  tokens.reserve(words.size());
  for (std::size_t i = 0; i < words.size();) {
    std::size_t matched = 0;
    if (auto it = phrases_.find(words[i]); it != phrases_.end()) {
      for (const auto& phrase : it->second) {
        if (i + phrase.size() <= words.size() &&
            std::equal(phrase.begin(), phrase.end(), words.begin() + static_cast<long>(i))) {
          matched = phrase.size();
          std::string token = phrase.front();
          for (std::size_t k = 1; k < phrase.size(); ++k) {
            token += '_';
            token += phrase[k];
          }
          tokens.push_back(std::move(token));
          break;
        }
      }
    }
    if (matched == 0) {
      tokens.push_back(words[i]);
      matched = 1;
    }
    i += matched;
  }
  return tokens;
}

std::vector<std::string> Encoder::mentioned_skills(std::string_view text) const {
  std::set<std::string> found;
  for (const auto& t : tokenize(text)) {
    if (std::binary_search(skill_tokens_.begin(), skill_tokens_.end(), t)) {
      found.insert(t);
    }
  }
  return {found.begin(), found.end()};
}

Embedding Encoder::embed(std::string_view text) const {
  const auto tokens = tokenize(text);
  const std::size_t buckets = bucket_count();
  Embedding e;
  e.values.assign(dim_, 0.0);

  StyleMarkers markers;
  bool affirmed = false;
  bool hypothetical = false;
  bool target_held = false;
  bool target_hypothetical = false;
  std::set<std::string> skills;

  // Per-sentence state for the skill indicators.
  bool s_affirm = false;
  bool s_hypo = false;
  std::vector<std::string_view> s_skills;
  auto close_sentence = [&] {
    for (auto sk : s_skills) {
      if (s_hypo) {
        hypothetical = true;
        target_hypothetical |= (sk == target_token_);
      } else {
        affirmed |= s_affirm;
        target_held |= (sk == target_token_);
      }
    }
    s_affirm = s_hypo = false;
    s_skills.clear();
  };

  for (const auto& t : tokens) {
    e.values[fnv1a64(t) % buckets] += kCountScale;
    if (t == kSentenceEnd) {
      close_sentence();
      continue;
    }
    if (is_hedge(t)) {
      ++markers.hedge;
    } else if (is_boast(t)) {
      ++markers.boast;
    } else if (is_filler(t)) {
      ++markers.filler;
    } else if (t == kAffirmativeMarker) {
      s_affirm = true;
    } else if (t == kHypotheticalMarker) {
      s_hypo = true;
    } else if (std::binary_search(skill_tokens_.begin(), skill_tokens_.end(), t)) {
      s_skills.push_back(t);
      skills.insert(t);
    }
  }
  close_sentence();

  // Long free-text answers are shrunk so the vector norm stays below d.
  double norm2 = 0.0;
  for (std::size_t k = 0; k < buckets; ++k) {
    norm2 += e.values[k] * e.values[k];
  }
  const double cap = static_cast<double>(dim_) / 2.0;
  if (norm2 > cap * cap) {
    const double shrink = cap / std::sqrt(norm2);
    for (std::size_t k = 0; k < buckets; ++k) {
      e.values[k] *= shrink;
    }
  }

  double* m = e.values.data() + buckets;
  m[0] = std::min(markers.hedge * kCountScale, 4.0);
  m[1] = std::min(markers.boast * kCountScale, 4.0);
  m[2] = std::min(markers.filler * kCountScale, 4.0);
  double* s = m + kMarkerFeatures;
  s[0] = affirmed ? 1.0 : 0.0;
  s[1] = hypothetical ? 1.0 : 0.0;
  s[2] = target_held ? 1.0 : 0.0;
  s[3] = target_hypothetical ? 1.0 : 0.0;
  s[4] = std::min(static_cast<double>(skills.size()) / 10.0, 3.0);
  return e;
}

TranscriptTensor Encoder::tensorize(const Transcript& transcript) const {
  if (transcript.empty()) {
    throw Error(Errc::kEmptyTranscript, "cannot tensorize an empty transcript");
  }
  TranscriptTensor t;
  t.rows = transcript.size();
  t.cols = row_width();
  t.data.assign(t.rows * t.cols, 0.0);
  for (std::size_t r = 0; r < t.rows; ++r) {
    double* row = t.data.data() + r * t.cols;
    if (const auto& q = transcript[r].question) {
      if (*q >= num_questions_) {
        throw Error(Errc::kUnknownQuestion, "question id " + std::to_string(*q) + " out of range");
      }
      row[*q] = 1.0;
    }
    const auto e = embed(transcript[r].text);
    std::copy(e.values.begin(), e.values.end(), row + num_questions_);
  }
  return t;
}

}  // namespace elicit
