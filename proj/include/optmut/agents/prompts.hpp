#pragma once

// Prompt templates: `[[system]]` and `[[user]]` sections with `{{name}}`
// placeholders. Defaults are compiled in from prompts/*.txt.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "optmut/agents/provider.hpp"

namespace optmut::agents {

struct PromptTemplate {
  std::string id;
  std::string system;
  std::string user;

  std::vector<std::string> placeholders() const;
};

// Throws Error(SchemaViolation) when a section marker is missing.
PromptTemplate parse_template(std::string id, const std::string& text);

// Throws Error(PreconditionFailed) naming any placeholder without a value.
// Substituted values are not rescanned.
std::vector<Message> render(const PromptTemplate& tpl, const std::map<std::string, std::string>& values);

class TemplateSet {
 public:
  static TemplateSet embedded();
  // Embedded defaults, with any `<id>.txt` found in `dir` taking precedence.
  static TemplateSet with_overrides(const std::filesystem::path& dir);

  // Throws Error(PreconditionFailed) for an unknown id.
  const PromptTemplate& get(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

inline constexpr const char* kInterfaceTemplate = "business_interface";
inline constexpr const char* kTestsTemplate = "tests";
inline constexpr const char* kModelTemplate = "model";
inline constexpr const char* kMutationsTemplate = "mutations";
inline constexpr const char* kAdjustTemplate = "adjust_tests";

}  // namespace optmut::agents
