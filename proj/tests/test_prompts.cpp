#include <gtest/gtest.h>

#include "optmut/agents/prompts.hpp"
#include "optmut/error.hpp"
#include "optmut/json_io.hpp"
#include "support.hpp"

using namespace optmut;
using namespace optmut::agents;

TEST(Templates, EmbeddedSetIsComplete) {
  const TemplateSet set = TemplateSet::embedded();
  EXPECT_EQ(set.ids(), (std::vector<std::string>{"adjust_tests", "business_interface", "model", "mutations", "tests"}));
  EXPECT_EQ(set.get(kInterfaceTemplate).placeholders(), (std::vector<std::string>{"attempt", "description"}));
  EXPECT_EQ(set.get(kMutationsTemplate).placeholders(),
            (std::vector<std::string>{"binding", "description", "interface", "iteration", "model", "rules", "testsuite"}));
  EXPECT_THROW(set.get("nope"), Error);
}

TEST(Templates, ParseAndRender) {
  const PromptTemplate t = parse_template("t", "[[system]]\nYou are {{role}}.\n[[user]]\nSolve {{task}} now; {{task}}!\n");
  EXPECT_EQ(t.placeholders(), (std::vector<std::string>{"role", "task"}));
  const auto msgs = render(t, {{"role", "a modeler"}, {"task", "{{role}}"}});
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0].role, "system");
  EXPECT_EQ(msgs[0].content, "You are a modeler.");
  EXPECT_EQ(msgs[1].content, "Solve {{role}} now; {{role}}!");
  try {
    render(t, {{"role", "x"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionFailed);
    EXPECT_NE(std::string(e.what()).find("task"), std::string::npos);
  }
  EXPECT_THROW(parse_template("bad", "no sections here"), Error);
}

TEST(Templates, DirectoryOverridesTakePrecedence) {
  const auto dir = testing_support::scratch_dir("prompts");
  write_file_atomic(dir / "tests.txt", "[[system]]\ncustom\n[[user]]\n{{description}}\n");
  const TemplateSet set = TemplateSet::with_overrides(dir);
  EXPECT_EQ(set.get(kTestsTemplate).system, "custom");
  EXPECT_EQ(set.get(kModelTemplate).system, TemplateSet::embedded().get(kModelTemplate).system);
}
