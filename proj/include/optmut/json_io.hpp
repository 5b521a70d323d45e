#pragma once

// Canonical JSON bundles: sorted keys, two-space indentation, a
// `schema_version` and a `kind` on every top-level document. Readers reject
// unknown fields with Error(SchemaViolation) located by a JSON pointer.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "optmut/interface.hpp"
#include "optmut/model.hpp"
#include "optmut/mutation.hpp"
#include "optmut/report.hpp"

namespace optmut {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

std::string canonical_dump(const Json& json);

Json to_json(const LpModel& model);
Json to_json(const BusinessInterface& bi);
Json to_json(const TestSuite& suite);
Json to_json(const InterfaceBinding& binding);
Json to_json(const CampaignReport& report);
Json to_json(const AggregateReport& report);
Json to_json(const MutationKind& kind);
Json mutants_to_json(const std::string& base_model, const std::vector<MutantEntry>& mutants,
                     const std::optional<CoverageReport>& coverage);

LpModel model_from_json(const Json& json);
BusinessInterface interface_from_json(const Json& json);
TestSuite suite_from_json(const Json& json);
InterfaceBinding binding_from_json(const Json& json);
CampaignReport campaign_report_from_json(const Json& json);
MutationKind mutation_from_json(const Json& json, const std::string& pointer = "");
std::vector<MutantEntry> mutants_from_json(const Json& json);

// Parses text, mapping syntax errors to Error(SchemaViolation).
Json parse_json(const std::string& text);

using Bundle = std::variant<LpModel, TestSuite, BusinessInterface, InterfaceBinding, CampaignReport>;

// Dispatches on the document's `kind`.
Bundle read_json_bundle(const std::filesystem::path& path);
void write_json_bundle(const Bundle& bundle, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace optmut
