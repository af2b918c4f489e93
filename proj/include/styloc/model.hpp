#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "styloc/matrix.hpp"
#include "styloc/tree.hpp"

namespace styloc {

enum class ModelKind {
    DecisionTree,
    RandomForest,
    Bagging,
    KNN,
    LinearSVM,
    GBT,
    NeuralHead,
};

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

inline constexpr int kModelFormatVersion = 1;

// Trained classifier behind the versioned model-file envelope. Classical
// models score a feature vector; the neural head scores raw source text.
class Model {
public:
    virtual ~Model() = default;

    virtual ModelKind kind() const = 0;
    // Higher is better; meaning is model-specific (vote shares, margins,
    // softmax probabilities, inverse-distance weights).
    virtual std::vector<double> score(const std::vector<double>& x) const;
    virtual std::vector<double> score_source(const std::string& source) const;
    // argmax with ties to the lowest class index unless a model overrides
    // (KNN applies its majority/nearest rules).
    virtual int predict_index(const std::vector<double>& x) const;

    virtual nlohmann::json payload_to_json() const = 0;

    std::vector<std::string> label_names;
    int layout_version = kFeatureLayoutVersion;
    std::uint64_t train_seed = 0;
    nlohmann::json hyperparameters = nlohmann::json::object();
};

struct Prediction {
    std::string label;
    std::vector<double> scores;  // aligned with label_names
};

// Width/layout-checked prediction for classical models.
Prediction predict(const Model& model, const std::vector<double>& features,
                   int layout_version);

void save_model(const Model& model, const std::string& path);
std::unique_ptr<Model> load_model(const std::string& path);

int argmax_lowest(const std::vector<double>& scores);

// ---- training parameter blocks -------------------------------------------

struct TreeParams {
    int max_depth = 8;
};
struct ForestParams {
    int n_estimators = 400;
    int max_depth = 64;  // effectively unlimited; purity stops growth first
    bool feature_subsample = true;  // sqrt(d) candidates per split
    int jobs = 1;
};
struct KnnParams {
    int k = 5;
};
struct SvmParams {
    int max_iter = 2000;
    double lambda = 1e-4;
};
struct GbtParams {
    int n_estimators = 400;
    int max_depth = 9;
    double learning_rate = 0.1;
    int jobs = 1;
};

std::unique_ptr<Model> train_decision_tree(const LabeledMatrix& data,
                                           const TreeParams& params,
                                           std::uint64_t seed);
std::unique_ptr<Model> train_random_forest(const LabeledMatrix& data,
                                           const ForestParams& params,
                                           std::uint64_t seed);
std::unique_ptr<Model> train_bagging(const LabeledMatrix& data,
                                     const ForestParams& params,
                                     std::uint64_t seed);
std::unique_ptr<Model> train_knn(const LabeledMatrix& data,
                                 const KnnParams& params, std::uint64_t seed);
std::unique_ptr<Model> train_linear_svm(const LabeledMatrix& data,
                                        const SvmParams& params,
                                        std::uint64_t seed);
std::unique_ptr<Model> train_gbt(const LabeledMatrix& data,
                                 const GbtParams& params, std::uint64_t seed);

// ---- concrete models -------------------------------------------------------

class TreeModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::DecisionTree; }
    std::vector<double> score(const std::vector<double>& x) const override;
    nlohmann::json payload_to_json() const override;

    DecisionTree tree;
};

class ForestModel : public Model {
public:
    explicit ForestModel(bool bagging = false) : bagging_(bagging) {}
    ModelKind kind() const override {
        return bagging_ ? ModelKind::Bagging : ModelKind::RandomForest;
    }
    std::vector<double> score(const std::vector<double>& x) const override;
    nlohmann::json payload_to_json() const override;

    std::vector<DecisionTree> trees;

private:
    bool bagging_ = false;
};

class KnnModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::KNN; }
    std::vector<double> score(const std::vector<double>& x) const override;
    int predict_index(const std::vector<double>& x) const override;
    nlohmann::json payload_to_json() const override;

    int k = 5;
    Standardizer standardizer;
    std::vector<double> train_values;  // standardized, row-major
    std::vector<int> train_labels;
    std::size_t width = 0;
};

class SvmModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::LinearSVM; }
    std::vector<double> score(const std::vector<double>& x) const override;
    nlohmann::json payload_to_json() const override;

    Standardizer standardizer;
    std::vector<std::vector<double>> weights;  // one-vs-rest, per class
    std::vector<double> biases;
};

class GbtModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::GBT; }
    std::vector<double> score(const std::vector<double>& x) const override;
    nlohmann::json payload_to_json() const override;

    std::vector<double> raw_scores(const std::vector<double>& x) const;

    std::vector<double> base_scores;               // prior log-probabilities
    std::vector<std::vector<DecisionTree>> rounds;  // [round][class]
    double learning_rate = 0.1;
    std::vector<double> loss_trace;  // mean train log-loss per round
};

std::vector<double> softmax(const std::vector<double>& z);

// Bootstrap multiplicities: n draws with replacement from n rows.
std::vector<double> bootstrap_weights(std::size_t n, Rng& rng);

}  // namespace styloc
