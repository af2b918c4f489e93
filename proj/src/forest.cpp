#include <atomic>
#include <cmath>
#include <thread>

#include "styloc/ioutil.hpp"
#include "styloc/model.hpp"

namespace styloc {

std::vector<double> bootstrap_weights(std::size_t n, Rng& rng) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        w[rng.below(n)] += 1.0;
    }
    return w;
}

namespace {

// Trees tolerate a single-class dataset (they collapse to one leaf); the
// margin/softmax trainers enforce >= 2 classes themselves.
void check_trainable(const LabeledMatrix& data) {
    if (data.n_rows == 0) throw DataError("training data is empty");
}

std::unique_ptr<Model> train_ensemble(const LabeledMatrix& data,
                                      const ForestParams& params,
                                      std::uint64_t seed, bool bagging) {
    check_trainable(data);
    auto model = std::make_unique<ForestModel>(bagging);
    model->label_names = data.label_names;
    model->layout_version = data.layout_version;
    model->train_seed = seed;
    model->trees.resize(params.n_estimators);

    SortedOrder order = presort(data);
    int mtry = 0;
    if (params.feature_subsample) {
        mtry = std::max(1, static_cast<int>(std::floor(
                               std::sqrt(static_cast<double>(data.n_cols)))));
    }
    TreeConfig cfg;
    cfg.max_depth = params.max_depth;
    cfg.mtry = mtry;
    cfg.classification = true;

    std::atomic<int> cursor{0};
    auto worker = [&]() {
        for (;;) {
            int t = cursor.fetch_add(1);
            if (t >= params.n_estimators) return;
            Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(t));
            std::vector<double> weights = bootstrap_weights(data.n_rows, rng);
            model->trees[t] =
                grow_tree(data, order, weights, {}, cfg, &rng);
        }
    };
    int jobs = std::max(1, params.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    model->hyperparameters = {
        {"n_estimators", params.n_estimators},
        {"max_depth", params.max_depth},
        {"feature_subsample", params.feature_subsample},
        {"mtry", mtry},
    };
    return model;
}

}  // namespace

std::unique_ptr<Model> train_decision_tree(const LabeledMatrix& data,
                                           const TreeParams& params,
                                           std::uint64_t seed) {
    check_trainable(data);
    auto model = std::make_unique<TreeModel>();
    model->label_names = data.label_names;
    model->layout_version = data.layout_version;
    model->train_seed = seed;
    model->hyperparameters = {{"max_depth", params.max_depth}};

    SortedOrder order = presort(data);
    std::vector<double> weights(data.n_rows, 1.0);
    TreeConfig cfg;
    cfg.max_depth = params.max_depth;
    cfg.classification = true;
    model->tree = grow_tree(data, order, weights, {}, cfg, nullptr);
    return model;
}

std::unique_ptr<Model> train_random_forest(const LabeledMatrix& data,
                                           const ForestParams& params,
                                           std::uint64_t seed) {
    return train_ensemble(data, params, seed, false);
}

std::unique_ptr<Model> train_bagging(const LabeledMatrix& data,
                                     const ForestParams& params,
                                     std::uint64_t seed) {
    ForestParams p = params;
    p.feature_subsample = false;
    return train_ensemble(data, p, seed, true);
}

std::vector<double> TreeModel::score(const std::vector<double>& x) const {
    return tree.nodes[tree.leaf_for(x.data())].fractions;
}

nlohmann::json TreeModel::payload_to_json() const {
    return {{"tree", tree_to_json(tree)}};
}

std::vector<double> ForestModel::score(const std::vector<double>& x) const {
    std::vector<double> votes(label_names.size(), 0.0);
    for (const DecisionTree& t : trees) {
        votes[t.nodes[t.leaf_for(x.data())].leaf_class] += 1.0;
    }
    for (double& v : votes) v /= static_cast<double>(trees.size());
    return votes;
}

nlohmann::json ForestModel::payload_to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const DecisionTree& t : trees) arr.push_back(tree_to_json(t));
    return {{"trees", std::move(arr)}};
}

}  // namespace styloc
