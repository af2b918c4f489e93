#include "styloc/model.hpp"

#include "styloc/ioutil.hpp"
#include "styloc/neural.hpp"

namespace styloc {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::DecisionTree: return "DecisionTree";
        case ModelKind::RandomForest: return "RandomForest";
        case ModelKind::Bagging: return "Bagging";
        case ModelKind::KNN: return "KNN";
        case ModelKind::LinearSVM: return "LinearSVM";
        case ModelKind::GBT: return "GBT";
        case ModelKind::NeuralHead: return "NeuralHead";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(ModelKind::NeuralHead); ++k) {
        if (name == model_kind_name(static_cast<ModelKind>(k))) {
            return static_cast<ModelKind>(k);
        }
    }
    throw DataError("unknown model kind: " + name);
}

std::vector<double> Model::score(const std::vector<double>&) const {
    throw UsageError(std::string(model_kind_name(kind())) +
                     " does not score feature vectors");
}

std::vector<double> Model::score_source(const std::string&) const {
    throw UsageError(std::string(model_kind_name(kind())) +
                     " does not score raw source; extract features first");
}

int argmax_lowest(const std::vector<double>& scores) {
    int best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = static_cast<int>(i);
    }
    return best;
}

int Model::predict_index(const std::vector<double>& x) const {
    return argmax_lowest(score(x));
}

Prediction predict(const Model& model, const std::vector<double>& features,
                   int layout_version) {
    if (layout_version != model.layout_version) {
        throw DataError("feature layout v" + std::to_string(layout_version) +
                        " does not match model layout v" +
                        std::to_string(model.layout_version));
    }
    Prediction p;
    p.scores = model.score(features);
    p.label = model.label_names[model.predict_index(features)];
    return p;
}

void save_model(const Model& model, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = model_kind_name(model.kind());
    j["hyperparameters"] = model.hyperparameters;
    j["label_names"] = model.label_names;
    j["layout_version"] = model.layout_version;
    j["train_seed"] = model.train_seed;
    j["payload"] = model.payload_to_json();
    write_file(path, j.dump(1) + "\n");
}

namespace {

std::unique_ptr<Model> instantiate(ModelKind kind, const nlohmann::json& payload) {
    switch (kind) {
        case ModelKind::DecisionTree: {
            auto m = std::make_unique<TreeModel>();
            m->tree = tree_from_json(payload.at("tree"));
            return m;
        }
        case ModelKind::RandomForest:
        case ModelKind::Bagging: {
            auto m = std::make_unique<ForestModel>(kind == ModelKind::Bagging);
            for (const auto& tj : payload.at("trees")) {
                m->trees.push_back(tree_from_json(tj));
            }
            if (m->trees.empty()) throw DataError("forest payload is empty");
            return m;
        }
        case ModelKind::KNN: {
            auto m = std::make_unique<KnnModel>();
            m->k = payload.at("k").get<int>();
            m->standardizer =
                Standardizer::from_json(payload.at("standardizer"));
            m->width = payload.at("width").get<std::size_t>();
            m->train_values = payload.at("values").get<std::vector<double>>();
            m->train_labels = payload.at("labels").get<std::vector<int>>();
            return m;
        }
        case ModelKind::LinearSVM: {
            auto m = std::make_unique<SvmModel>();
            m->standardizer =
                Standardizer::from_json(payload.at("standardizer"));
            m->weights =
                payload.at("weights").get<std::vector<std::vector<double>>>();
            m->biases = payload.at("biases").get<std::vector<double>>();
            return m;
        }
        case ModelKind::GBT: {
            auto m = std::make_unique<GbtModel>();
            m->base_scores =
                payload.at("base_scores").get<std::vector<double>>();
            m->learning_rate = payload.at("learning_rate").get<double>();
            if (payload.contains("loss_trace")) {
                m->loss_trace =
                    payload.at("loss_trace").get<std::vector<double>>();
            }
            for (const auto& round : payload.at("rounds")) {
                std::vector<DecisionTree> trees;
                for (const auto& tj : round) trees.push_back(tree_from_json(tj));
                m->rounds.push_back(std::move(trees));
            }
            return m;
        }
        case ModelKind::NeuralHead:
            return NeuralModel::from_payload(payload);
    }
    throw DataError("unhandled model kind");
}

}  // namespace

std::unique_ptr<Model> load_model(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file is not valid JSON: " + path + ": " +
                        e.what());
    }
    int version = j.value("format_version", -1);
    if (version != kModelFormatVersion) {
        throw DataError("model format v" + std::to_string(version) +
                        " is not supported (expected v" +
                        std::to_string(kModelFormatVersion) + ")");
    }
    ModelKind kind = model_kind_from_name(j.at("kind").get<std::string>());
    std::unique_ptr<Model> model = instantiate(kind, j.at("payload"));
    model->label_names =
        j.at("label_names").get<std::vector<std::string>>();
    model->layout_version = j.at("layout_version").get<int>();
    model->train_seed = j.at("train_seed").get<std::uint64_t>();
    model->hyperparameters = j.value("hyperparameters", nlohmann::json::object());
    return model;
}

}  // namespace styloc
