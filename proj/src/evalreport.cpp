#include "styloc/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "styloc/curate.hpp"
#include "styloc/ioutil.hpp"
#include "styloc/rng.hpp"

namespace styloc {

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : counts) {
        for (std::size_t c : row) t += c;
    }
    return t;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

EvalReport report_from_confusion(ConfusionMatrix matrix) {
    EvalReport rep;
    const std::size_t k = matrix.label_names.size();
    const std::size_t total = matrix.total();
    if (total == 0) throw DataError("evaluate: empty validation set");

    rep.per_class.resize(k);
    std::vector<std::size_t> col_sums(k, 0);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) col_sums[c] += matrix.counts[r][c];
    }
    for (std::size_t c = 0; c < k; ++c) {
        PerClassMetrics& m = rep.per_class[c];
        std::size_t row_sum = 0;
        for (std::size_t j = 0; j < k; ++j) row_sum += matrix.counts[c][j];
        std::size_t diag = matrix.counts[c][c];
        m.support = row_sum;
        m.precision = col_sums[c] > 0
                          ? static_cast<double>(diag) /
                                static_cast<double>(col_sums[c])
                          : 0.0;
        m.recall = row_sum > 0 ? static_cast<double>(diag) /
                                     static_cast<double>(row_sum)
                               : 0.0;
        m.f1 = m.precision + m.recall > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
    }
    rep.accuracy = static_cast<double>(matrix.trace()) /
                   static_cast<double>(total);
    for (const PerClassMetrics& m : rep.per_class) {
        rep.macro_precision += m.precision;
        rep.macro_recall += m.recall;
        rep.macro_f1 += m.f1;
        rep.weighted_precision +=
            m.precision * static_cast<double>(m.support);
    }
    rep.macro_precision /= static_cast<double>(k);
    rep.macro_recall /= static_cast<double>(k);
    rep.macro_f1 /= static_cast<double>(k);
    rep.weighted_precision /= static_cast<double>(total);
    rep.matrix = std::move(matrix);
    return rep;
}

namespace {

int label_index_of(const Model& model, const std::string& label) {
    for (std::size_t i = 0; i < model.label_names.size(); ++i) {
        if (model.label_names[i] == label) return static_cast<int>(i);
    }
    throw DataError("evaluate: label '" + label +
                    "' is unknown to the model");
}

}  // namespace

EvalReport evaluate_features(const Model& model,
                             const FeatureTable& validation) {
    if (validation.rows.empty()) {
        throw DataError("evaluate: empty validation set");
    }
    if (validation.layout_version != model.layout_version) {
        throw DataError("evaluate: feature layout does not match the model");
    }
    const std::size_t k = model.label_names.size();
    ConfusionMatrix matrix;
    matrix.label_names = model.label_names;
    matrix.counts.assign(k, std::vector<std::size_t>(k, 0));
    for (const FeatureRow& row : validation.rows) {
        int truth = label_index_of(model, row.label);
        int pred = model.predict_index(row.values);
        ++matrix.counts[truth][pred];
    }
    return report_from_confusion(std::move(matrix));
}

EvalReport evaluate_samples(const Model& model,
                            const std::vector<CodeSample>& validation,
                            bool with_comments, bool tolerant) {
    if (validation.empty()) throw DataError("evaluate: empty validation set");
    const std::size_t k = model.label_names.size();
    ConfusionMatrix matrix;
    matrix.label_names = model.label_names;
    matrix.counts.assign(k, std::vector<std::size_t>(k, 0));
    for (const CodeSample& s : validation) {
        int truth = label_index_of(model, s.author);
        int pred;
        if (model.kind() == ModelKind::NeuralHead) {
            std::string code = with_comments ? s.code : strip_comments(s.code);
            pred = argmax_lowest(model.score_source(code));
        } else {
            FeatureVector fv = feature_vector(s.code, with_comments, tolerant);
            pred = model.predict_index(fv.values);
        }
        ++matrix.counts[truth][pred];
    }
    return report_from_confusion(std::move(matrix));
}

std::vector<CurvePoint> learning_curve(const TrainerFn& trainer,
                                       const FeatureTable& train,
                                       const FeatureTable& validation,
                                       const std::vector<std::size_t>& sizes,
                                       std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> by_author;
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
        by_author[train.rows[i].label].push_back(i);
    }
    std::size_t available = SIZE_MAX;
    for (const auto& [author, rows] : by_author) {
        available = std::min(available, rows.size());
    }

    std::vector<CurvePoint> points;
    for (std::size_t pi = 0; pi < sizes.size(); ++pi) {
        std::size_t size = sizes[pi];
        if (size == 0 || size > available) {
            throw DataError("learning_curve: size " + std::to_string(size) +
                            " exceeds the smallest author's " +
                            std::to_string(available) + " samples");
        }
        std::vector<std::size_t> chosen;
        std::size_t author_idx = 0;
        for (const auto& [author, rows] : by_author) {
            if (size == rows.size()) {
                chosen.insert(chosen.end(), rows.begin(), rows.end());
            } else {
                std::vector<std::size_t> pool = rows;
                Rng rng = Rng::keyed(seed, pi * 1000003ULL + author_idx);
                rng.shuffle(pool);
                chosen.insert(chosen.end(), pool.begin(), pool.begin() + size);
            }
            ++author_idx;
        }
        std::sort(chosen.begin(), chosen.end());

        FeatureTable subset;
        subset.names = train.names;
        subset.layout_version = train.layout_version;
        for (std::size_t i : chosen) subset.rows.push_back(train.rows[i]);

        std::unique_ptr<Model> model = trainer(matrix_from_table(subset));
        EvalReport report = evaluate_features(*model, validation);
        points.push_back({size, report.macro_f1});
    }
    return points;
}

AblationResult comment_ablation(const TrainerFn& trainer,
                                const std::vector<CodeSample>& samples,
                                double ratio, std::uint64_t seed) {
    DatasetSplit parts = split(samples, ratio, seed);

    auto features_for = [&](const std::vector<CodeSample>& set,
                            bool with_comments) {
        FeatureTable table;
        table.names = feature_names_v1();
        for (const CodeSample& s : set) {
            FeatureExtraction ex = extract_features(s.code, with_comments);
            if (!ex.parsed_fully) {
                throw DataError("ablation: sample " + s.id +
                                " does not parse: " + ex.first_diagnostic);
            }
            table.rows.push_back({s.id, s.author, ex.vector.values});
        }
        return table;
    };

    AblationResult out;
    for (bool with_comments : {true, false}) {
        FeatureTable train_table = features_for(parts.train, with_comments);
        FeatureTable val_table = features_for(parts.validation, with_comments);
        std::unique_ptr<Model> model = trainer(matrix_from_table(train_table));
        EvalReport report = evaluate_features(*model, val_table);
        (with_comments ? out.with_comments : out.without_comments) =
            std::move(report);
    }
    return out;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_class = nlohmann::json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const PerClassMetrics& m = report.per_class[c];
        per_class.push_back({{"label", report.matrix.label_names[c]},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"support", m.support}});
    }
    return {{"accuracy", report.accuracy},
            {"macro_precision", report.macro_precision},
            {"macro_recall", report.macro_recall},
            {"macro_f1", report.macro_f1},
            {"weighted_precision", report.weighted_precision},
            {"per_class", std::move(per_class)},
            {"confusion", {{"labels", report.matrix.label_names},
                           {"counts", report.matrix.counts}}}};
}

std::string confusion_csv(const ConfusionMatrix& matrix) {
    std::string out = "true\\predicted";
    for (const auto& name : matrix.label_names) {
        out += ',';
        out += csv_escape(name);
    }
    out += '\n';
    for (std::size_t r = 0; r < matrix.counts.size(); ++r) {
        out += csv_escape(matrix.label_names[r]);
        for (std::size_t c : matrix.counts[r]) {
            out += ',';
            out += std::to_string(c);
        }
        out += '\n';
    }
    return out;
}

std::string report_table(const std::string& model_name,
                         const EvalReport& report, double train_seconds,
                         bool with_comments,
                         const std::string& key_parameters) {
    std::ostringstream out;
    char acc[16], prec[16], secs[24];
    std::snprintf(acc, sizeof(acc), "%.2f", 100.0 * report.accuracy);
    std::snprintf(prec, sizeof(prec), "%.2f", 100.0 * report.macro_precision);
    std::snprintf(secs, sizeof(secs), "%.2f", train_seconds);
    out << "Model            | Acc (%) | Prec (%) | Time (s) | Comments | "
           "Key Parameters\n";
    out << "-----------------+---------+----------+----------+----------+"
           "----------------\n";
    out << model_name;
    for (std::size_t i = model_name.size(); i < 17; ++i) out << ' ';
    out << "| " << acc;
    for (std::size_t i = std::string(acc).size(); i < 8; ++i) out << ' ';
    out << "| " << prec;
    for (std::size_t i = std::string(prec).size(); i < 9; ++i) out << ' ';
    out << "| " << secs;
    for (std::size_t i = std::string(secs).size(); i < 9; ++i) out << ' ';
    out << "| " << (with_comments ? "yes" : "no ") << "      | "
        << key_parameters << "\n";
    return out.str();
}

}  // namespace styloc
