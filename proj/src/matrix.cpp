#include "styloc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "styloc/ioutil.hpp"

namespace styloc {

LabeledMatrix matrix_from_table(const FeatureTable& table) {
    LabeledMatrix m;
    m.n_rows = table.rows.size();
    m.n_cols = table.names.size();
    m.layout_version = table.layout_version;

    std::vector<std::string> names;
    for (const auto& r : table.rows) names.push_back(r.label);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    m.label_names = names;

    std::map<std::string, int> index;
    for (std::size_t i = 0; i < names.size(); ++i) {
        index[names[i]] = static_cast<int>(i);
    }

    m.values.reserve(m.n_rows * m.n_cols);
    m.labels.reserve(m.n_rows);
    for (const auto& r : table.rows) {
        if (r.values.size() != m.n_cols) {
            throw DataError("feature row width mismatch for id " + r.id);
        }
        m.values.insert(m.values.end(), r.values.begin(), r.values.end());
        m.labels.push_back(index[r.label]);
    }
    return m;
}

Standardizer Standardizer::fit(const LabeledMatrix& m) {
    Standardizer s;
    s.mean.assign(m.n_cols, 0.0);
    s.scale.assign(m.n_cols, 0.0);
    if (m.n_rows == 0) return s;
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < m.n_cols; ++c) {
            s.mean[c] += m.at(r, c);
        }
    }
    for (double& v : s.mean) v /= static_cast<double>(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < m.n_cols; ++c) {
            double d = m.at(r, c) - s.mean[c];
            s.scale[c] += d * d;
        }
    }
    for (std::size_t c = 0; c < m.n_cols; ++c) {
        double var = s.scale[c] / static_cast<double>(m.n_rows);
        s.scale[c] = var > 1e-24 ? std::sqrt(var) : 0.0;
    }
    return s;
}

void Standardizer::apply(LabeledMatrix& m) const {
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < m.n_cols; ++c) {
            double& v = m.values[r * m.n_cols + c];
            v = scale[c] > 0.0 ? (v - mean[c]) / scale[c] : 0.0;
        }
    }
}

std::vector<double> Standardizer::transform(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) {
        out[c] = scale[c] > 0.0 ? (x[c] - mean[c]) / scale[c] : 0.0;
    }
    return out;
}

nlohmann::json Standardizer::to_json() const {
    return {{"mean", mean}, {"scale", scale}};
}

Standardizer Standardizer::from_json(const nlohmann::json& j) {
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.scale = j.at("scale").get<std::vector<double>>();
    return s;
}

}  // namespace styloc
