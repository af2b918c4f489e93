#include <cmath>

#include "styloc/ioutil.hpp"
#include "styloc/model.hpp"

namespace styloc {

// One-vs-rest linear SVM trained with the Pegasos subgradient schedule:
// step 1/(lambda*t) on L2-regularized hinge loss, seeded shuffling per
// epoch, early exit once an epoch has no margin violations.
std::unique_ptr<Model> train_linear_svm(const LabeledMatrix& data,
                                        const SvmParams& params,
                                        std::uint64_t seed) {
    if (data.n_rows == 0) throw DataError("training data is empty");
    const int k = static_cast<int>(data.n_classes());
    if (k < 2) throw DataError("training data must contain at least 2 classes");
    std::vector<std::size_t> class_counts(k, 0);
    for (int label : data.labels) ++class_counts[label];
    for (int c = 0; c < k; ++c) {
        if (class_counts[c] == 0) {
            throw DataError("svm: class '" + data.label_names[c] +
                            "' has no samples");
        }
    }

    auto model = std::make_unique<SvmModel>();
    model->label_names = data.label_names;
    model->layout_version = data.layout_version;
    model->train_seed = seed;
    model->hyperparameters = {{"max_iter", params.max_iter},
                              {"lambda", params.lambda}};

    model->standardizer = Standardizer::fit(data);
    LabeledMatrix std_data = data;
    model->standardizer.apply(std_data);

    const std::size_t n = std_data.n_rows;
    const std::size_t d = std_data.n_cols;
    model->weights.assign(k, std::vector<double>(d, 0.0));
    model->biases.assign(k, 0.0);

    // the bias rides along as a constant augmented feature so it shares the
    // regularized Pegasos step and stays bounded
    for (int c = 0; c < k; ++c) {
        Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(c));
        std::vector<double> w(d + 1, 0.0);
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;

        std::uint64_t t = 0;
        for (int epoch = 0; epoch < params.max_iter; ++epoch) {
            rng.shuffle(idx);
            bool violated = false;
            for (std::size_t i : idx) {
                ++t;
                const double eta = 1.0 / (params.lambda * static_cast<double>(t));
                const double y = std_data.labels[i] == c ? 1.0 : -1.0;
                const double* x = std_data.row(i);
                double margin = w[d];
                for (std::size_t f = 0; f < d; ++f) margin += w[f] * x[f];
                const double decay = 1.0 - eta * params.lambda;
                for (double& wf : w) wf *= decay;
                if (y * margin < 1.0) {
                    violated = true;
                    for (std::size_t f = 0; f < d; ++f) w[f] += eta * y * x[f];
                    w[d] += eta * y;
                }
            }
            if (!violated) break;
        }
        model->biases[c] = w[d];
        w.resize(d);
        model->weights[c] = std::move(w);
    }
    return model;
}

std::vector<double> SvmModel::score(const std::vector<double>& x) const {
    std::vector<double> q = standardizer.transform(x);
    std::vector<double> margins(weights.size(), 0.0);
    for (std::size_t c = 0; c < weights.size(); ++c) {
        double m = biases[c];
        for (std::size_t f = 0; f < q.size(); ++f) m += weights[c][f] * q[f];
        margins[c] = m;
    }
    return margins;
}

nlohmann::json SvmModel::payload_to_json() const {
    return {{"standardizer", standardizer.to_json()},
            {"weights", weights},
            {"biases", biases}};
}

}  // namespace styloc
