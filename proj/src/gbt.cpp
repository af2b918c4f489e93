#include <cmath>
#include <thread>

#include "styloc/ioutil.hpp"
#include "styloc/model.hpp"

namespace styloc {

std::vector<double> softmax(const std::vector<double>& z) {
    std::vector<double> p(z.size());
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// First-order multinomial gradient boosting with a softmax link: per round,
// one variance-reduction regression tree per class is fit to the residuals
// (one-hot minus probability); leaves predict the mean residual, shrunk by
// the learning rate. Scores start at the prior log-probabilities.
std::unique_ptr<Model> train_gbt(const LabeledMatrix& data,
                                 const GbtParams& params, std::uint64_t seed) {
    if (data.n_rows == 0) throw DataError("training data is empty");
    const int k = static_cast<int>(data.n_classes());
    if (k < 2) throw DataError("training data must contain at least 2 classes");

    const std::size_t n = data.n_rows;
    std::vector<std::size_t> class_counts(k, 0);
    for (int label : data.labels) ++class_counts[label];
    for (int c = 0; c < k; ++c) {
        if (class_counts[c] == 0) {
            throw DataError("gbt: class '" + data.label_names[c] +
                            "' has no samples");
        }
    }

    auto model = std::make_unique<GbtModel>();
    model->label_names = data.label_names;
    model->layout_version = data.layout_version;
    model->train_seed = seed;
    model->learning_rate = params.learning_rate;
    model->hyperparameters = {{"n_estimators", params.n_estimators},
                              {"max_depth", params.max_depth},
                              {"learning_rate", params.learning_rate}};

    model->base_scores.resize(k);
    for (int c = 0; c < k; ++c) {
        model->base_scores[c] =
            std::log(static_cast<double>(class_counts[c]) /
                     static_cast<double>(n));
    }

    SortedOrder order = presort(data);
    const std::vector<double> unit_weights(n, 1.0);
    TreeConfig cfg;
    cfg.max_depth = params.max_depth;
    cfg.classification = false;

    // scores[i*k + c], probabilities updated in place per round
    std::vector<double> scores(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < k; ++c) scores[i * k + c] = model->base_scores[c];
    }
    std::vector<double> probs(n * k);

    const int jobs = std::max(1, params.jobs);
    for (int round = 0; round < params.n_estimators; ++round) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> z(scores.begin() + i * k,
                                  scores.begin() + (i + 1) * k);
            std::vector<double> p = softmax(z);
            for (int c = 0; c < k; ++c) probs[i * k + c] = p[c];
            loss -= std::log(std::max(p[data.labels[i]], 1e-300));
        }
        model->loss_trace.push_back(loss / static_cast<double>(n));

        std::vector<DecisionTree> class_trees(k);
        std::vector<std::vector<std::int32_t>> leaves(k);
        auto fit_class = [&](int c) {
            std::vector<double> target(n);
            for (std::size_t i = 0; i < n; ++i) {
                target[i] = (data.labels[i] == c ? 1.0 : 0.0) -
                            probs[i * k + c];
            }
            class_trees[c] = grow_tree(data, order, unit_weights, target, cfg,
                                       nullptr, &leaves[c]);
        };
        if (jobs == 1 || k == 1) {
            for (int c = 0; c < k; ++c) fit_class(c);
        } else {
            std::vector<std::thread> pool;
            for (int c = 0; c < k; ++c) pool.emplace_back(fit_class, c);
            for (auto& th : pool) th.join();
        }
        for (int c = 0; c < k; ++c) {
            const DecisionTree& tree = class_trees[c];
            for (std::size_t i = 0; i < n; ++i) {
                scores[i * k + c] += params.learning_rate *
                                     tree.nodes[leaves[c][i]].value;
            }
        }
        model->rounds.push_back(std::move(class_trees));
    }
    return model;
}

std::vector<double> GbtModel::raw_scores(const std::vector<double>& x) const {
    std::vector<double> z = base_scores;
    for (const auto& round : rounds) {
        for (std::size_t c = 0; c < round.size(); ++c) {
            const DecisionTree& t = round[c];
            z[c] += learning_rate * t.nodes[t.leaf_for(x.data())].value;
        }
    }
    return z;
}

std::vector<double> GbtModel::score(const std::vector<double>& x) const {
    return softmax(raw_scores(x));
}

nlohmann::json GbtModel::payload_to_json() const {
    nlohmann::json rounds_json = nlohmann::json::array();
    for (const auto& round : rounds) {
        nlohmann::json class_json = nlohmann::json::array();
        for (const auto& t : round) class_json.push_back(tree_to_json(t));
        rounds_json.push_back(std::move(class_json));
    }
    return {{"base_scores", base_scores},
            {"learning_rate", learning_rate},
            {"rounds", std::move(rounds_json)},
            {"loss_trace", loss_trace}};
}

}  // namespace styloc
