#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "styloc/sample.hpp"

namespace styloc {

struct DatasetSplit {
    std::vector<CodeSample> train;
    std::vector<CodeSample> validation;
    std::uint64_t seed = 0;
    double ratio = 0.8;
};

// Drops samples whose code bytes equal an earlier sample's exactly; renames,
// reformatting and comment edits all survive.
std::vector<CodeSample> dedup(const std::vector<CodeSample>& samples);

// Keeps only valid samples (compiled, unflagged) and equalizes per-author
// counts at the smallest author's count via seeded drops.
std::vector<CodeSample> balance(const std::vector<CodeSample>& samples,
                                std::uint64_t seed);

// Stratified per-author split; floor(ratio * n) of each author to train.
DatasetSplit split(const std::vector<CodeSample>& samples, double ratio,
                   std::uint64_t seed);

// Accepts a directory of author subdirectories holding .c files, or a
// .jsonl dataset file.
std::vector<CodeSample> ingest_benchmark(const std::string& path);

}  // namespace styloc
