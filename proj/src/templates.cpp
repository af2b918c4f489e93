#include "styloc/templates.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "styloc/ioutil.hpp"
#include "styloc/rng.hpp"

namespace styloc {

namespace {
constexpr std::uint64_t kMaxInstanceSpace = 1000000000000000000ULL;  // 1e18
}

std::uint64_t PlaceholderDomain::size() const {
    if (is_range) {
        return hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
    }
    return values.size();
}

std::string PlaceholderDomain::value_at(std::uint64_t index) const {
    if (is_range) return std::to_string(lo + static_cast<long long>(index));
    return values.at(index);
}

std::uint64_t count_instances(const TaskTemplate& t) {
    std::uint64_t product = 1;
    for (const auto& [name, dom] : t.placeholders) {
        std::uint64_t s = dom.size();
        if (s == 0) {
            throw DataError("template '" + t.id + "': placeholder '" + name +
                            "' has an empty domain");
        }
        if (product > kMaxInstanceSpace / s) {
            throw DataError("template '" + t.id +
                            "': instance space exceeds 1e18");
        }
        product *= s;
    }
    return product;
}

std::uint64_t total_instances(const std::vector<TaskTemplate>& templates) {
    std::uint64_t total = 0;
    for (const auto& t : templates) {
        std::uint64_t p = count_instances(t);
        if (total > kMaxInstanceSpace - p) {
            throw DataError("combined instance space exceeds 1e18");
        }
        total += p;
    }
    return total;
}

std::string render_template(
    const TaskTemplate& t, const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(t.text.size());
    std::size_t pos = 0;
    while (pos < t.text.size()) {
        std::size_t open = t.text.find('{', pos);
        if (open == std::string::npos) {
            out.append(t.text, pos, std::string::npos);
            break;
        }
        std::size_t close = t.text.find('}', open);
        if (close == std::string::npos) {
            throw DataError("template '" + t.id + "': unbalanced '{'");
        }
        out.append(t.text, pos, open - pos);
        std::string name = t.text.substr(open + 1, close - open - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) {
            throw DataError("template '" + t.id + "': placeholder '" + name +
                            "' has no domain");
        }
        out += it->second;
        pos = close + 1;
    }
    return out;
}

namespace {

// Mixed-radix decode of an instance rank into placeholder bindings,
// placeholders taken in name order.
std::map<std::string, std::string> unrank(const TaskTemplate& t,
                                          std::uint64_t rank) {
    std::map<std::string, std::string> bindings;
    for (const auto& [name, dom] : t.placeholders) {
        std::uint64_t s = dom.size();
        bindings[name] = dom.value_at(rank % s);
        rank /= s;
    }
    return bindings;
}

std::vector<std::uint64_t> sample_distinct(std::uint64_t space,
                                           std::uint64_t want, Rng rng) {
    std::vector<std::uint64_t> ranks;
    if (want == space) {
        ranks.resize(space);
        for (std::uint64_t i = 0; i < space; ++i) ranks[i] = i;
        return ranks;
    }
    if (space <= 2 * want || space <= 4096) {
        // partial Fisher-Yates over the enumerated space
        std::vector<std::uint64_t> all(space);
        for (std::uint64_t i = 0; i < space; ++i) all[i] = i;
        for (std::uint64_t i = 0; i < want; ++i) {
            std::uint64_t j = i + rng.below(space - i);
            std::swap(all[i], all[j]);
        }
        ranks.assign(all.begin(), all.begin() + static_cast<long>(want));
    } else {
        std::set<std::uint64_t> seen;
        while (seen.size() < want) seen.insert(rng.below(space));
        ranks.assign(seen.begin(), seen.end());
        return ranks;  // already sorted
    }
    std::sort(ranks.begin(), ranks.end());
    return ranks;
}

}  // namespace

std::vector<PromptInstance> expand(const std::vector<TaskTemplate>& templates,
                                   std::uint64_t q, std::uint64_t seed) {
    if (templates.empty()) throw DataError("expand: no templates");
    const std::size_t n = templates.size();
    std::vector<std::uint64_t> capacity(n);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        capacity[i] = count_instances(templates[i]);
        total += capacity[i];
    }
    if (q > total) {
        throw DataError("expand: requested " + std::to_string(q) +
                        " instances but only " + std::to_string(total) +
                        " exist");
    }

    // round-robin allocation, skipping templates at capacity
    std::vector<std::uint64_t> quota(n, 0);
    std::uint64_t assigned = 0;
    std::size_t cursor = 0;
    while (assigned < q) {
        std::size_t i = cursor % n;
        if (quota[i] < capacity[i]) {
            ++quota[i];
            ++assigned;
        }
        ++cursor;
    }

    std::vector<std::vector<std::uint64_t>> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (quota[i] > 0) {
            ranks[i] = sample_distinct(capacity[i], quota[i],
                                       Rng::keyed(seed, i));
        }
    }

    std::vector<PromptInstance> out;
    out.reserve(q);
    std::uint64_t round = 0;
    while (out.size() < q) {
        for (std::size_t i = 0; i < n && out.size() < q; ++i) {
            if (round < ranks[i].size()) {
                PromptInstance inst;
                inst.template_id = templates[i].id;
                inst.bindings = unrank(templates[i], ranks[i][round]);
                inst.text = render_template(templates[i], inst.bindings);
                out.push_back(std::move(inst));
            }
        }
        ++round;
    }
    return out;
}

namespace {

TaskTemplate template_from_json(const nlohmann::json& j) {
    TaskTemplate t;
    t.id = j.at("id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    if (j.contains("placeholders")) {
        for (auto it = j.at("placeholders").begin();
             it != j.at("placeholders").end(); ++it) {
            PlaceholderDomain dom;
            const auto& spec = it.value();
            if (spec.contains("range")) {
                dom.is_range = true;
                dom.lo = spec.at("range").at(0).get<long long>();
                dom.hi = spec.at("range").at(1).get<long long>();
            } else if (spec.contains("list")) {
                dom.values =
                    spec.at("list").get<std::vector<std::string>>();
            } else {
                throw DataError("template '" + t.id + "': placeholder '" +
                                it.key() + "' needs a list or range");
            }
            t.placeholders[it.key()] = std::move(dom);
        }
    }
    // every {name} slot must be declared
    (void)render_template(t, [&] {
        std::map<std::string, std::string> probe;
        for (const auto& [name, dom] : t.placeholders) {
            probe[name] = dom.size() ? dom.value_at(0) : "";
        }
        return probe;
    }());
    return t;
}

}  // namespace

std::vector<TaskTemplate> templates_from_jsonl(std::string_view text) {
    std::vector<TaskTemplate> out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(template_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad template on line " + std::to_string(line_no) +
                            ": " + e.what());
        }
    }
    return out;
}

std::vector<TaskTemplate> read_templates(const std::string& path) {
    return templates_from_jsonl(read_file(path));
}

std::string instances_to_jsonl(const std::vector<PromptInstance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        nlohmann::json j;
        j["template_id"] = inst.template_id;
        j["bindings"] = inst.bindings;
        j["text"] = inst.text;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<PromptInstance> instances_from_jsonl(std::string_view text) {
    std::vector<PromptInstance> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        PromptInstance inst;
        inst.template_id = j.at("template_id").get<std::string>();
        if (j.contains("bindings")) {
            inst.bindings =
                j.at("bindings").get<std::map<std::string, std::string>>();
        }
        inst.text = j.at("text").get<std::string>();
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace styloc
