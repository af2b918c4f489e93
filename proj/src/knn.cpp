#include <algorithm>
#include <cmath>

#include "styloc/ioutil.hpp"
#include "styloc/model.hpp"

namespace styloc {

std::unique_ptr<Model> train_knn(const LabeledMatrix& data,
                                 const KnnParams& params, std::uint64_t seed) {
    if (data.n_rows == 0) throw DataError("training data is empty");
    if (params.k < 1 ||
        static_cast<std::size_t>(params.k) > data.n_rows) {
        throw DataError("knn: k must be in [1, n_train]");
    }
    auto model = std::make_unique<KnnModel>();
    model->label_names = data.label_names;
    model->layout_version = data.layout_version;
    model->train_seed = seed;
    model->k = params.k;
    model->width = data.n_cols;
    model->hyperparameters = {{"neighbors", params.k}};

    model->standardizer = Standardizer::fit(data);
    LabeledMatrix standardized = data;
    model->standardizer.apply(standardized);
    model->train_values = std::move(standardized.values);
    model->train_labels = data.labels;
    return model;
}

namespace {

struct Neighbor {
    double distance;
    std::size_t row;
    int label;
};

std::vector<Neighbor> nearest(const KnnModel& m, const std::vector<double>& q,
                              int k) {
    const std::size_t n = m.train_labels.size();
    std::vector<Neighbor> all(n);
    for (std::size_t r = 0; r < n; ++r) {
        double d2 = 0.0;
        const double* row = &m.train_values[r * m.width];
        for (std::size_t c = 0; c < m.width; ++c) {
            double diff = row[c] - q[c];
            d2 += diff * diff;
        }
        all[r] = {std::sqrt(d2), r, m.train_labels[r]};
    }
    // distance ties resolved by the lower row index
    std::partial_sort(all.begin(), all.begin() + k, all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                          return a.distance != b.distance
                                     ? a.distance < b.distance
                                     : a.row < b.row;
                      });
    all.resize(k);
    return all;
}

}  // namespace

std::vector<double> KnnModel::score(const std::vector<double>& x) const {
    std::vector<double> q = standardizer.transform(x);
    std::vector<Neighbor> knn = nearest(*this, q, k);
    std::vector<double> weights(label_names.size(), 0.0);
    double total = 0.0;
    for (const Neighbor& nb : knn) {
        double w = 1.0 / (nb.distance + 1e-12);
        weights[nb.label] += w;
        total += w;
    }
    if (total > 0.0) {
        for (double& w : weights) w /= total;
    }
    return weights;
}

int KnnModel::predict_index(const std::vector<double>& x) const {
    std::vector<double> q = standardizer.transform(x);
    std::vector<Neighbor> knn = nearest(*this, q, k);
    std::vector<int> votes(label_names.size(), 0);
    int best = 0;
    for (const Neighbor& nb : knn) ++votes[nb.label];
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) best = static_cast<int>(c);
    }
    // vote tie: first neighbor (nearest) whose class is among the tied wins
    std::vector<bool> tied(votes.size(), false);
    int n_tied = 0;
    for (std::size_t c = 0; c < votes.size(); ++c) {
        tied[c] = votes[c] == votes[best];
        n_tied += tied[c];
    }
    if (n_tied > 1) {
        for (const Neighbor& nb : knn) {
            if (tied[nb.label]) return nb.label;
        }
    }
    return best;
}

nlohmann::json KnnModel::payload_to_json() const {
    return {{"k", k},
            {"standardizer", standardizer.to_json()},
            {"width", width},
            {"values", train_values},
            {"labels", train_labels}};
}

}  // namespace styloc
