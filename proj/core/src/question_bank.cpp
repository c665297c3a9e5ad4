#include "elicit/question_bank.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "elicit/error.hpp"

namespace elicit {

namespace {

const std::vector<std::string>& default_skills() {
  static const std::vector<std::string> skills = {
      "customer service",   "microsoft office",       "leadership",
      "management",         "microsoft excel",        "public speaking",
      "sales",              "microsoft word",         "strategic planning",
      "project management", "social media",           "marketing",
      "team building",      "powerpoint",             "research",
      "training",           "event planning",         "time management",
      "process improvement", "team leadership",       "account management",
      "teamwork",           "program management",     "sales management",
      "marketing strategy", "business development",   "budgets",
      "new business development", "social media marketing", "strategy",
  };
  return skills;
}

}  // namespace

std::string normalize_skill(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    const auto uch = static_cast<unsigned char>(ch);
    if (std::isspace(uch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uch)));
  }
  return out;
}

QuestionBank::QuestionBank(const std::vector<std::string>& skills, std::string_view target_skill) {
  if (skills.size() < 2) {
    throw Error(Errc::kMalformedBank, "a bank needs at least two skills");
  }
  std::set<std::string> seen;
  questions_.reserve(skills.size());
  for (const auto& raw : skills) {
    std::string name = normalize_skill(raw);
    if (name.empty()) {
      throw Error(Errc::kMalformedBank, "blank skill name");
    }
    if (!seen.insert(name).second) {
      throw Error(Errc::kMalformedBank, "duplicate skill '" + name + "'");
    }
    QuestionSpec spec;
    spec.id = questions_.size();
    spec.skill_name = std::move(name);
    spec.prompt_template = std::string(kPromptTemplate);
    questions_.push_back(std::move(spec));
  }
  target_skill_ = normalize_skill(target_skill);
  auto target = find(target_skill_);
  if (!target) {
    throw Error(Errc::kMalformedBank, "target skill '" + target_skill_ + "' is not in the bank");
  }
  target_id_ = *target;
}

QuestionBank QuestionBank::default_bank() {
  return QuestionBank(default_skills(), "leadership");
}

QuestionBank QuestionBank::from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedBank, e.what());
  }
  if (!doc.is_object() || !doc.contains("target_skill") || !doc.contains("skills") ||
      !doc["target_skill"].is_string() || !doc["skills"].is_array()) {
    throw Error(Errc::kMalformedBank,
                R"(expected {"target_skill": string, "skills": [string, ...]})");
  }
  std::vector<std::string> skills;
  for (const auto& s : doc["skills"]) {
    if (!s.is_string()) {
      throw Error(Errc::kMalformedBank, "skill entries must be strings");
    }
    skills.push_back(s.get<std::string>());
  }
  return QuestionBank(skills, doc["target_skill"].get<std::string>());
}

std::string QuestionBank::to_json() const {
  nlohmann::json doc;
  doc["target_skill"] = target_skill_;
  auto skills = nlohmann::json::array();
  for (const auto& q : questions_) {
    skills.push_back(q.skill_name);
  }
  doc["skills"] = std::move(skills);
  return doc.dump();
}

const QuestionSpec& QuestionBank::question(QuestionId id) const {
  if (id >= questions_.size()) {
    throw Error(Errc::kUnknownQuestion,
                "question " + std::to_string(id) + " not in a bank of " +
                    std::to_string(questions_.size()));
  }
  return questions_[id];
}

std::optional<QuestionId> QuestionBank::find(std::string_view skill) const {
  const std::string key = normalize_skill(skill);
  auto it = std::find_if(questions_.begin(), questions_.end(),
                         [&](const QuestionSpec& q) { return q.skill_name == key; });
  if (it == questions_.end()) {
    return std::nullopt;
  }
  return it->id;
}

QuestionBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoFailure, "cannot open bank file " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return QuestionBank::from_json(text);
}

void save_bank(const QuestionBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::kIoFailure, "cannot write bank file " + path.string());
  }
  out << bank.to_json() << '\n';
}

std::string render_question(const QuestionBank& bank, QuestionId id) {
  const QuestionSpec& q = bank.question(id);
  std::string text = q.prompt_template;
  static constexpr std::string_view kSlot = "{skill}";
  if (auto pos = text.find(kSlot); pos != std::string::npos) {
    text.replace(pos, kSlot.size(), q.skill_name);
  }
  return text;
}

}  // namespace elicit
