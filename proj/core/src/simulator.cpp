#include "elicit/simulator.hpp"

#include <algorithm>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/rng.hpp"

namespace elicit {

namespace {

// Stream tags keep persona sampling and response generation independent.
constexpr std::uint64_t kPersonaStream = 0x70657273;   // "pers"
constexpr std::uint64_t kResponseStream = 0x72657370;  // "resp"

using Sentence = std::vector<std::string>;

void append_words(Sentence& sentence, std::string_view phrase) {
  std::istringstream is{std::string(phrase)};
  std::string w;
  while (is >> w) {
    sentence.push_back(w);
  }
}

Sentence skill_sentence(std::string_view lead, std::string_view verb, std::string_view skill,
                        std::string_view tail) {
  Sentence s{"i"};
  if (!lead.empty()) {
    s.emplace_back(lead);
  }
  s.emplace_back(verb);
  append_words(s, skill);
  s.emplace_back(tail);
  return s;
}

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& tokens) {
  return tokens[uniform_index(rng, N)];
}

}  // namespace

double modesty_from_traits(const TraitVector& traits) noexcept {
  return std::clamp((1.0 - traits[kExtroversion] + traits[kAgreeableness]) / 2.0, 0.0, 1.0);
}

Simulator::Simulator(QuestionBank bank, SimulatorConfig config)
    : bank_(std::move(bank)), config_(config) {}

Persona Simulator::sample_persona(std::uint64_t seed, double prevalence, std::int64_t id) const {
  Rng rng(derive_seed({kPersonaStream, seed}));
  Persona p;
  p.id = id;
  p.seed = seed;
  for (double& t : p.traits) {
    t = uniform01(rng);
  }
  p.has_target = bernoulli(rng, prevalence);
  for (const auto& q : bank_.questions()) {
    if (q.id == bank_.target_id()) {
      if (p.has_target) {
        p.true_skills.insert(q.skill_name);
      }
    } else if (bernoulli(rng, config_.skill_inclusion)) {
      p.true_skills.insert(q.skill_name);
    }
  }
  p.modesty = modesty_from_traits(p.traits);
  return p;
}

Persona Simulator::make_persona(std::int64_t id, const std::vector<std::string>& skills,
                                const TraitVector& traits, std::uint64_t seed) const {
  Persona p;
  p.id = id;
  p.seed = seed;
  for (std::size_t k = 0; k < traits.size(); ++k) {
    p.traits[k] = std::clamp(traits[k], 0.0, 1.0);
  }
  for (const auto& raw : skills) {
    if (auto qid = bank_.find(raw)) {
      p.true_skills.insert(bank_.question(*qid).skill_name);
    }
  }
  p.has_target = p.true_skills.contains(bank_.target_skill());
  p.modesty = modesty_from_traits(p.traits);
  return p;
}

Response Simulator::initial_summary(const Persona& persona) const {
  return compose(persona, nullptr, 0);
}

Response Simulator::respond(const Persona& persona, const QuestionSpec& question,
                            const Transcript& history) const {
  return compose(persona, &bank_.question(question.id), history.size());
}

Response Simulator::compose(const Persona& persona, const QuestionSpec* queried,
                            std::size_t history_size) const {
  const std::uint64_t qtag = queried ? queried->id + 1 : 0;
  Rng rng(derive_seed({kResponseStream, persona.seed, qtag, history_size}));

  Response r;
  std::vector<Sentence> sentences;
  sentences.push_back({"i", "am", "a", "professional"});

  const double suppression = persona.modesty * config_.suppression_weight;
  for (const auto& q : bank_.questions()) {
    if (!persona.true_skills.contains(q.skill_name)) {
      continue;
    }
    if (queried && q.id == queried->id) {
      continue;
    }
    if (q.id == bank_.target_id() && !config_.unprompted_target) {
      continue;
    }
    if (bernoulli(rng, 1.0 - suppression)) {
      sentences.push_back(skill_sentence("", "have", q.skill_name, "experience"));
      r.mentioned_skills.insert(q.skill_name);
    }
  }

  if (queried) {
    const bool held = persona.true_skills.contains(queried->skill_name);
    if (held && bernoulli(rng, 1.0 - suppression * config_.direct_attenuation)) {
      sentences.push_back(skill_sentence("already", "have", queried->skill_name, "experience"));
    } else {
      sentences.push_back(skill_sentence("would", "bring", queried->skill_name, "skills"));
    }
    r.mentioned_skills.insert(queried->skill_name);
  }

  const auto& t = persona.traits;
  const int cap = config_.max_markers_per_kind;
  const int boasts = binomial(rng, cap, t[kExtroversion]);
  const int hedges = binomial(rng, cap, (t[kAgreeableness] + t[kNeuroticism]) / 2.0);
  const int fillers = binomial(rng, cap, (1.0 - t[kConscientiousness] + t[kOpenness]) / 2.0);

  // Each marker lands right after the leading "i" of a random sentence.
  auto insert_marker = [&](std::string_view token) {
    Sentence& s = sentences[uniform_index(rng, sentences.size())];
    s.insert(s.begin() + 1, std::string(token));
  };
  for (int k = 0; k < boasts; ++k) {
    insert_marker(pick(rng, kBoastTokens));
  }
  for (int k = 0; k < hedges; ++k) {
    insert_marker(pick(rng, kHedgeTokens));
  }
  for (int k = 0; k < fillers; ++k) {
    insert_marker(pick(rng, kFillerTokens));
  }
  r.style_markers = StyleMarkers{hedges, boasts, fillers};

  std::string text;
  for (const auto& s : sentences) {
    for (const auto& w : s) {
      text += w;
      text += ' ';
    }
    text += ". ";
  }
  text.pop_back();
  r.text = std::move(text);
  return r;
}

}  // namespace elicit
