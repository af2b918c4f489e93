#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "styloc/features.hpp"

namespace styloc {

struct LabeledMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;  // row-major
    std::vector<int> labels;
    std::vector<std::string> label_names;
    int layout_version = kFeatureLayoutVersion;

    double at(std::size_t r, std::size_t c) const {
        return values[r * n_cols + c];
    }
    const double* row(std::size_t r) const { return &values[r * n_cols]; }
    std::size_t n_classes() const { return label_names.size(); }
};

// Label names are sorted and deduplicated so class indices are stable
// across runs regardless of row order.
LabeledMatrix matrix_from_table(const FeatureTable& table);

// Per-feature z-scoring with population statistics fit on training data;
// constant features map to zero.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // zero marks a constant feature

    static Standardizer fit(const LabeledMatrix& m);
    void apply(LabeledMatrix& m) const;
    std::vector<double> transform(const std::vector<double>& x) const;

    nlohmann::json to_json() const;
    static Standardizer from_json(const nlohmann::json& j);
};

}  // namespace styloc
