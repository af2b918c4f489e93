#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace styloc {

// Well-known flags; the set is open so pipeline stages can add their own.
namespace flags {
inline constexpr const char* kUnparseable = "unparseable";
inline constexpr const char* kStripped = "stripped";
inline constexpr const char* kNoFence = "nofence";
inline constexpr const char* kMultiBlock = "multiblock";
inline constexpr const char* kEmptyCode = "emptycode";
inline constexpr const char* kTimeout = "timeout";
inline constexpr const char* kNoFunctions = "nofunctions";
}  // namespace flags

struct CodeSample {
    std::string id;  // content hash of code bytes
    std::string author;
    std::string template_id;
    std::string prompt;
    std::string code;
    std::optional<bool> compiled;  // unset = not validated yet
    std::set<std::string> flags;

    bool valid_for_training() const {
        return compiled.has_value() && *compiled && flags.empty();
    }
};

// id = sha256(code); author/template/prompt carried as provenance.
CodeSample make_sample(std::string author, std::string template_id,
                       std::string prompt, std::string code);

nlohmann::json sample_to_json(const CodeSample& s);
CodeSample sample_from_json(const nlohmann::json& j);

std::string samples_to_jsonl(const std::vector<CodeSample>& samples);
std::vector<CodeSample> samples_from_jsonl(std::string_view text);

std::vector<CodeSample> read_samples(const std::string& path);
void write_samples(const std::string& path,
                   const std::vector<CodeSample>& samples);

}  // namespace styloc
