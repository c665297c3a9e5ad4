#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

using QuestionId = std::size_t;

struct QuestionSpec {
  QuestionId id = 0;
  std::string skill_name;
  std::string prompt_template;

  bool operator==(const QuestionSpec&) const = default;
};

inline constexpr std::string_view kPromptTemplate =
    "Suppose you also had the skill '{skill}'. Describe yourself.";

/// The fixed, human-authored question set. Every question asks the respondent
/// to describe themselves as if they also held one skill. Immutable after
/// construction.
class QuestionBank {
 public:
  /// Skill names are lowercased and trimmed. Throws kMalformedBank on an empty
  /// or single-entry list, duplicates, blank names or a target outside the list.
  QuestionBank(const std::vector<std::string>& skills, std::string_view target_skill);

  /// The 30 most common profile skills, in frequency order, targeting "leadership".
  static QuestionBank default_bank();

  static QuestionBank from_json(std::string_view json_text);
  std::string to_json() const;

  std::size_t size() const noexcept { return questions_.size(); }
  const std::vector<QuestionSpec>& questions() const noexcept { return questions_; }
  const QuestionSpec& question(QuestionId id) const;
  const std::string& target_skill() const noexcept { return target_skill_; }
  QuestionId target_id() const noexcept { return target_id_; }
  std::optional<QuestionId> find(std::string_view skill) const;

  bool operator==(const QuestionBank&) const = default;

 private:
  std::vector<QuestionSpec> questions_;
  std::string target_skill_;
  QuestionId target_id_ = 0;
};

QuestionBank load_bank(const std::filesystem::path& path);
void save_bank(const QuestionBank& bank, const std::filesystem::path& path);

/// Deterministic prompt text for one question. Throws kUnknownQuestion.
std::string render_question(const QuestionBank& bank, QuestionId id);

std::string normalize_skill(std::string_view raw);

}  // namespace elicit
