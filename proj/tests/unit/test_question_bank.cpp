#include <fstream>

#include <gtest/gtest.h>

#include "elicit/question_bank.hpp"
#include "unit/test_support.hpp"

namespace elicit {
namespace {

TEST(QuestionBank, ShippedFileHoldsThirtySkills) {
  const auto bank = load_bank(std::filesystem::path(ELICIT_DATA_DIR) / "default_bank.json");
  ASSERT_EQ(bank.size(), 30u);
  EXPECT_EQ(bank.question(0).skill_name, "customer service");
  EXPECT_EQ(bank.question(2).skill_name, "leadership");
  EXPECT_EQ(bank.target_skill(), "leadership");
  EXPECT_EQ(bank.target_id(), 2u);
  EXPECT_EQ(bank, QuestionBank::default_bank());
}

TEST(QuestionBank, MinimalBankHasDenseIds) {
  const QuestionBank bank({"sales", "leadership"}, "leadership");
  ASSERT_EQ(bank.size(), 2u);
  EXPECT_EQ(bank.question(0).id, 0u);
  EXPECT_EQ(bank.question(1).id, 1u);
  EXPECT_EQ(bank.target_id(), 1u);
}

TEST(QuestionBank, RejectsMalformedLists) {
  EXPECT_ELICIT_ERROR(QuestionBank({"sales", "Sales ", "leadership"}, "leadership"),
                      Errc::kMalformedBank);
  EXPECT_ELICIT_ERROR(QuestionBank({"leadership"}, "leadership"), Errc::kMalformedBank);
  EXPECT_ELICIT_ERROR(QuestionBank({"sales", "  "}, "sales"), Errc::kMalformedBank);
  EXPECT_ELICIT_ERROR(QuestionBank({"sales", "marketing"}, "leadership"), Errc::kMalformedBank);
  EXPECT_ELICIT_ERROR(QuestionBank::from_json("{\"skills\": [1, 2]}"), Errc::kMalformedBank);
}

TEST(QuestionBank, NormalizesNames) {
  const QuestionBank bank({"  Sales", "LEADERSHIP "}, "Leadership");
  EXPECT_EQ(bank.question(0).skill_name, "sales");
  EXPECT_EQ(bank.target_skill(), "leadership");
  EXPECT_EQ(bank.find(" SALES"), std::optional<QuestionId>(0));
  EXPECT_FALSE(bank.find("marketing"));
}

TEST(QuestionBank, RendersPrompts) {
  const auto bank = QuestionBank::default_bank();
  EXPECT_EQ(render_question(bank, 2),
            "Suppose you also had the skill 'leadership'. Describe yourself.");
  EXPECT_NE(render_question(bank, 0).find("customer service"), std::string::npos);
  EXPECT_ELICIT_ERROR(render_question(bank, 30), Errc::kUnknownQuestion);
  EXPECT_EQ(render_question(bank, 5), render_question(QuestionBank::default_bank(), 5));
}

TEST(QuestionBank, SaveLoadIsIdentity) {
  test::TempDir dir("bank");
  const QuestionBank bank({"sales", "public speaking", "leadership"}, "public speaking");
  save_bank(bank, dir.path() / "b.json");
  EXPECT_EQ(load_bank(dir.path() / "b.json"), bank);
  EXPECT_ELICIT_ERROR(load_bank(dir.path() / "missing.json"), Errc::kIoFailure);
}

}  // namespace
}  // namespace elicit
