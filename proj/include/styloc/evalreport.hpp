#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "styloc/model.hpp"
#include "styloc/sample.hpp"

namespace styloc {

struct ConfusionMatrix {
    std::vector<std::string> label_names;
    std::vector<std::vector<std::size_t>> counts;  // row = true, col = predicted

    std::size_t total() const;
    std::size_t trace() const;
};

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_precision = 0.0;  // support-weighted, reported alongside
    std::vector<PerClassMetrics> per_class;
    ConfusionMatrix matrix;
};

// Precision = diag/column-sum (0 for empty columns), recall = diag/row-sum,
// macro = unweighted mean over classes.
EvalReport report_from_confusion(ConfusionMatrix matrix);

EvalReport evaluate_features(const Model& model, const FeatureTable& validation);

// Routes through feature extraction for classical models and through the
// tokenizer for the neural head; unparseable samples raise unless tolerant.
EvalReport evaluate_samples(const Model& model,
                            const std::vector<CodeSample>& validation,
                            bool with_comments, bool tolerant = false);

using TrainerFn =
    std::function<std::unique_ptr<Model>(const LabeledMatrix& train)>;

struct CurvePoint {
    std::size_t size;  // training samples per author
    double macro_f1;
};

// Trains afresh on seeded per-author subsamples of increasing size and
// evaluates each model on the fixed validation table. Requesting every
// available sample reproduces the full-data training set exactly.
std::vector<CurvePoint> learning_curve(const TrainerFn& trainer,
                                       const FeatureTable& train,
                                       const FeatureTable& validation,
                                       const std::vector<std::size_t>& sizes,
                                       std::uint64_t seed);

struct AblationResult {
    EvalReport with_comments;
    EvalReport without_comments;
};

// Same split and seed for both conditions; the without-condition strips
// comments before feature extraction, zeroing the comment features.
AblationResult comment_ablation(const TrainerFn& trainer,
                                const std::vector<CodeSample>& samples,
                                double ratio, std::uint64_t seed);

nlohmann::json report_to_json(const EvalReport& report);
std::string confusion_csv(const ConfusionMatrix& matrix);

// Plain-text row layout: Model | Acc (%) | Prec (%) | Time | Comments |
// Key Parameters.
std::string report_table(const std::string& model_name,
                         const EvalReport& report, double train_seconds,
                         bool with_comments,
                         const std::string& key_parameters);

}  // namespace styloc
