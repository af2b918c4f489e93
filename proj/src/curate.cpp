#include "styloc/curate.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "styloc/ioutil.hpp"
#include "styloc/rng.hpp"

namespace styloc {

std::vector<CodeSample> dedup(const std::vector<CodeSample>& samples) {
    std::vector<CodeSample> out;
    std::unordered_set<std::string> seen;
    out.reserve(samples.size());
    for (const CodeSample& s : samples) {
        if (seen.insert(s.code).second) out.push_back(s);
    }
    return out;
}

namespace {

// Authors in first-appearance-independent order so derived seeds do not
// depend on sample ordering.
std::vector<std::string> sorted_authors(
    const std::vector<CodeSample>& samples) {
    std::vector<std::string> authors;
    for (const auto& s : samples) authors.push_back(s.author);
    std::sort(authors.begin(), authors.end());
    authors.erase(std::unique(authors.begin(), authors.end()), authors.end());
    return authors;
}

}  // namespace

std::vector<CodeSample> balance(const std::vector<CodeSample>& samples,
                                std::uint64_t seed) {
    std::vector<std::string> authors = sorted_authors(samples);
    if (authors.empty()) throw DataError("balance: no samples");

    std::map<std::string, std::vector<std::size_t>> valid_by_author;
    for (const auto& a : authors) valid_by_author[a] = {};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].valid_for_training()) {
            valid_by_author[samples[i].author].push_back(i);
        }
    }

    std::size_t floor_count = SIZE_MAX;
    for (const auto& a : authors) {
        if (valid_by_author[a].empty()) {
            throw DataError("balance: author '" + a +
                            "' has no valid samples");
        }
        floor_count = std::min(floor_count, valid_by_author[a].size());
    }

    std::vector<bool> keep(samples.size(), false);
    for (std::size_t ai = 0; ai < authors.size(); ++ai) {
        auto& idx = valid_by_author[authors[ai]];
        if (idx.size() > floor_count) {
            Rng rng = Rng::keyed(seed, ai);
            rng.shuffle(idx);
            idx.resize(floor_count);
        }
        for (std::size_t i : idx) keep[i] = true;
    }
    std::vector<CodeSample> out;
    out.reserve(floor_count * authors.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (keep[i]) out.push_back(samples[i]);
    }
    return out;
}

DatasetSplit split(const std::vector<CodeSample>& samples, double ratio,
                   std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DataError("split: ratio must be in (0, 1)");
    }
    DatasetSplit out;
    out.seed = seed;
    out.ratio = ratio;

    std::vector<std::string> authors = sorted_authors(samples);
    std::map<std::string, std::vector<std::size_t>> by_author;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        by_author[samples[i].author].push_back(i);
    }
    for (std::size_t ai = 0; ai < authors.size(); ++ai) {
        auto& idx = by_author[authors[ai]];
        if (idx.size() < 2) {
            throw DataError("split: author '" + authors[ai] +
                            "' has fewer than 2 samples");
        }
        Rng rng = Rng::keyed(seed, ai);
        rng.shuffle(idx);
        std::size_t n_train = static_cast<std::size_t>(
            ratio * static_cast<double>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            (j < n_train ? out.train : out.validation)
                .push_back(samples[idx[j]]);
        }
    }
    return out;
}

std::vector<CodeSample> ingest_benchmark(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path root(path);
    if (!fs::exists(root)) {
        throw DataError("ingest: path does not exist: " + path);
    }
    if (fs::is_regular_file(root)) {
        if (root.extension() == ".jsonl") return read_samples(path);
        throw DataError("ingest: unrecognized file (expected .jsonl): " + path);
    }

    std::vector<CodeSample> out;
    std::vector<fs::path> authors;
    for (const auto& entry : fs::directory_iterator(root)) {
        std::string name = entry.path().filename().string();
        if (!name.empty() && name[0] == '.') continue;
        if (!entry.is_directory()) {
            throw DataError("ingest: unrecognized entry (expected author "
                            "directories): " + entry.path().string());
        }
        authors.push_back(entry.path());
    }
    if (authors.empty()) {
        throw DataError("ingest: no author directories under " + path);
    }
    std::sort(authors.begin(), authors.end());
    for (const auto& author_dir : authors) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(author_dir)) {
            std::string name = entry.path().filename().string();
            if (!name.empty() && name[0] == '.') continue;
            if (!entry.is_regular_file() || entry.path().extension() != ".c") {
                throw DataError("ingest: unrecognized entry (expected .c "
                                "files): " + entry.path().string());
            }
            files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            out.push_back(make_sample(author_dir.filename().string(), "", "",
                                      read_file(f)));
        }
    }
    return out;
}

}  // namespace styloc
