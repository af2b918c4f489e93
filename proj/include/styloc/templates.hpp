#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace styloc {

struct PlaceholderDomain {
    bool is_range = false;
    long long lo = 0, hi = 0;          // inclusive, range form
    std::vector<std::string> values;   // list form

    std::uint64_t size() const;
    std::string value_at(std::uint64_t index) const;
};

struct TaskTemplate {
    std::string id;
    std::string text;  // contains {name} slots
    std::map<std::string, PlaceholderDomain> placeholders;  // name-sorted
};

struct PromptInstance {
    std::string template_id;
    std::map<std::string, std::string> bindings;
    std::string text;
};

// Product of placeholder domain sizes; 1 when there are no placeholders.
// Throws DataError on an empty domain or on overflow past 1e18.
std::uint64_t count_instances(const TaskTemplate& t);
std::uint64_t total_instances(const std::vector<TaskTemplate>& templates);

// Q distinct instances, sampled without replacement with a counter-based
// generator; templates are filled round-robin so each contributes
// floor(Q/N) or ceil(Q/N) when capacity allows.
std::vector<PromptInstance> expand(const std::vector<TaskTemplate>& templates,
                                   std::uint64_t q, std::uint64_t seed);

std::string render_template(const TaskTemplate& t,
                            const std::map<std::string, std::string>& bindings);

std::vector<TaskTemplate> templates_from_jsonl(std::string_view text);
std::vector<TaskTemplate> read_templates(const std::string& path);

std::string instances_to_jsonl(const std::vector<PromptInstance>& instances);
std::vector<PromptInstance> instances_from_jsonl(std::string_view text);

}  // namespace styloc
