#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "styloc/metrics.hpp"

namespace styloc {

inline constexpr int kFeatureLayoutVersion = 1;

struct FeatureVector {
    int layout_version = kFeatureLayoutVersion;
    std::vector<double> values;
    std::vector<std::string> names;
};

struct FeatureExtraction {
    FeatureVector vector;
    bool parsed_fully = false;
    bool has_functions = false;
    std::string first_diagnostic;
};

// Layout v1: 5 file metrics, then mean/max/sum of 13 per-function scalars,
// then pooled node_tf over the full taxonomy, then pooled bigram_tf
// restricted to the frozen top-50 vocabulary below.
const std::vector<std::string>& feature_names_v1();
const std::vector<BigramKey>& bigram_vocab_v1();

FeatureExtraction extract_features(std::string_view source, bool with_comments);

// Throws DataError naming the first diagnostic when the sample does not
// parse fully, unless tolerant is set.
FeatureVector feature_vector(std::string_view source, bool with_comments,
                             bool tolerant = false);

struct FeatureRow {
    std::string id;
    std::string label;
    std::vector<double> values;
};

struct FeatureTable {
    std::vector<std::string> names;  // feature names, excluding id/label
    std::vector<FeatureRow> rows;
    int layout_version = kFeatureLayoutVersion;
};

// CSV: header "id,label,<names...>", full round-trip precision, '.' decimals.
std::string feature_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(std::string_view csv);

}  // namespace styloc
