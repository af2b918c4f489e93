#include "styloc/sample.hpp"

#include "styloc/hash.hpp"
#include "styloc/ioutil.hpp"

namespace styloc {

CodeSample make_sample(std::string author, std::string template_id,
                       std::string prompt, std::string code) {
    CodeSample s;
    s.id = sha256_hex(code);
    s.author = std::move(author);
    s.template_id = std::move(template_id);
    s.prompt = std::move(prompt);
    s.code = std::move(code);
    return s;
}

nlohmann::json sample_to_json(const CodeSample& s) {
    nlohmann::json j;
    j["id"] = s.id;
    j["author"] = s.author;
    j["template_id"] = s.template_id;
    j["prompt"] = s.prompt;
    j["code"] = s.code;
    if (s.compiled.has_value()) {
        j["compiled"] = *s.compiled;
    } else {
        j["compiled"] = nullptr;
    }
    j["flags"] = s.flags;
    return j;
}

CodeSample sample_from_json(const nlohmann::json& j) {
    CodeSample s;
    s.author = j.value("author", j.value("model", ""));
    s.template_id = j.value("template_id", "");
    s.prompt = j.value("prompt", "");
    s.code = j.at("code").get<std::string>();
    s.id = j.contains("id") && j.at("id").is_string()
               ? j.at("id").get<std::string>()
               : sha256_hex(s.code);
    if (j.contains("compiled") && !j.at("compiled").is_null()) {
        s.compiled = j.at("compiled").get<bool>();
    }
    if (j.contains("flags")) {
        for (const auto& f : j.at("flags")) {
            s.flags.insert(f.get<std::string>());
        }
    }
    return s;
}

std::string samples_to_jsonl(const std::vector<CodeSample>& samples) {
    std::string out;
    for (const CodeSample& s : samples) {
        out += sample_to_json(s).dump();
        out += '\n';
    }
    return out;
}

std::vector<CodeSample> samples_from_jsonl(std::string_view text) {
    std::vector<CodeSample> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(sample_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad sample on line " + std::to_string(line_no) +
                            ": " + e.what());
        }
    }
    return out;
}

std::vector<CodeSample> read_samples(const std::string& path) {
    return samples_from_jsonl(read_file(path));
}

void write_samples(const std::string& path,
                   const std::vector<CodeSample>& samples) {
    write_file(path, samples_to_jsonl(samples));
}

}  // namespace styloc
