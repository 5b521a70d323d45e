#include "optmut/agents/prompts.hpp"

#include <set>

#include "optmut/error.hpp"
#include "optmut/json_io.hpp"

namespace optmut::agents {

namespace detail {
const std::map<std::string, std::string>& embedded_templates();
}

namespace {

constexpr std::string_view kSystemMarker = "[[system]]";
constexpr std::string_view kUserMarker = "[[user]]";

std::string trim_block(std::string s) {
  while (!s.empty() && (s.front() == '\n' || s.front() == '\r')) s.erase(s.begin());
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

template <typename F>
void scan_placeholders(const std::string& text, F&& on_placeholder) {
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    const std::size_t end = text.find("}}", pos + 2);
    if (end == std::string::npos) break;
    on_placeholder(pos, end + 2, text.substr(pos + 2, end - pos - 2));
    pos = end + 2;
  }
}

std::string fill(const std::string& text, const std::map<std::string, std::string>& values,
                 std::set<std::string>& missing) {
  std::string out;
  std::size_t copied = 0;
  scan_placeholders(text, [&](std::size_t begin, std::size_t end, const std::string& name) {
    out.append(text, copied, begin - copied);
    auto it = values.find(name);
    if (it == values.end()) {
      missing.insert(name);
      out.append(text, begin, end - begin);
    } else {
      out += it->second;
    }
    copied = end;
  });
  out.append(text, copied, std::string::npos);
  return out;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::set<std::string> names;
  auto collect = [&](std::size_t, std::size_t, const std::string& name) { names.insert(name); };
  scan_placeholders(system, collect);
  scan_placeholders(user, collect);
  return {names.begin(), names.end()};
}

PromptTemplate parse_template(std::string id, const std::string& text) {
  const auto sys = text.find(kSystemMarker);
  const auto usr = text.find(kUserMarker);
  if (sys == std::string::npos || usr == std::string::npos || usr < sys)
    throw Error(ErrorCode::SchemaViolation, "template '" + id + "' needs a [[system]] section followed by [[user]]");
  PromptTemplate t;
  t.id = std::move(id);
  t.system = trim_block(text.substr(sys + kSystemMarker.size(), usr - sys - kSystemMarker.size()));
  t.user = trim_block(text.substr(usr + kUserMarker.size()));
  return t;
}

std::vector<Message> render(const PromptTemplate& tpl, const std::map<std::string, std::string>& values) {
  std::set<std::string> missing;
  std::vector<Message> out{{"system", fill(tpl.system, values, missing)}, {"user", fill(tpl.user, values, missing)}};
  if (!missing.empty()) {
    std::string names;
    for (const auto& n : missing) names += (names.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::PreconditionFailed, "template '" + tpl.id + "' has unfilled placeholders: " + names);
  }
  return out;
}

TemplateSet TemplateSet::embedded() {
  TemplateSet set;
  for (const auto& [id, text] : detail::embedded_templates()) set.templates_.emplace(id, parse_template(id, text));
  return set;
}

TemplateSet TemplateSet::with_overrides(const std::filesystem::path& dir) {
  TemplateSet set = embedded();
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorCode::IoError, "prompt directory '" + dir.string() + "' does not exist");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    const std::string id = entry.path().stem().string();
    set.templates_.insert_or_assign(id, parse_template(id, read_text_file(entry.path())));
  }
  return set;
}

const PromptTemplate& TemplateSet::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(ErrorCode::PreconditionFailed, "unknown prompt template '" + id + "'");
  return it->second;
}

std::vector<std::string> TemplateSet::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : templates_) out.push_back(id);
  return out;
}

}  // namespace optmut::agents
