// styloc — stylometric authorship attribution for C source code.
// Subcommands cover the whole pipeline: template expansion, generation,
// ingest, compile validation, dedup/balance/split, feature extraction,
// training, evaluation, learning curves, comment ablation and single-file
// attribution. Every randomized step takes an explicit seed (default 42).

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "styloc/compilecheck.hpp"
#include "styloc/curate.hpp"
#include "styloc/evalreport.hpp"
#include "styloc/features.hpp"
#include "styloc/genclient.hpp"
#include "styloc/ioutil.hpp"
#include "styloc/model.hpp"
#include "styloc/neural.hpp"
#include "styloc/templates.hpp"

using namespace styloc;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

FeatureTable features_from_samples(const std::vector<CodeSample>& samples,
                                   bool with_comments, bool tolerant,
                                   bool skip_unparseable,
                                   std::size_t* skipped = nullptr) {
    FeatureTable table;
    table.names = feature_names_v1();
    for (const CodeSample& s : samples) {
        FeatureExtraction ex = extract_features(s.code, with_comments);
        if (!ex.parsed_fully && !tolerant) {
            if (skip_unparseable) {
                if (skipped) ++*skipped;
                continue;
            }
            throw DataError("sample " + s.id +
                            " does not parse: " + ex.first_diagnostic);
        }
        table.rows.push_back({s.id, s.author, std::move(ex.vector.values)});
    }
    return table;
}

struct TrainSettings {
    std::string kind = "gbt";
    int max_depth = -1;      // -1 = kind default
    int estimators = -1;
    int neighbors = 5;
    int max_iter = 2000;
    double learning_rate = 0.1;
    int jobs = 1;
    std::uint64_t seed = 42;
    bool with_comments = true;
    // neural
    int epochs = 200;
    int embed_dim = 64;
    int layers = 2;
    int heads = 4;
    int max_tokens = 512;
    int batch_size = 8;
    double neural_lr = 0.05;
};

std::unique_ptr<Model> train_classical(const TrainSettings& s,
                                       const LabeledMatrix& data) {
    if (s.kind == "tree") {
        TreeParams p{s.max_depth > 0 ? s.max_depth : 8};
        return train_decision_tree(data, p, s.seed);
    }
    if (s.kind == "forest" || s.kind == "bagging") {
        ForestParams p;
        p.n_estimators = s.estimators > 0 ? s.estimators
                                          : (s.kind == "forest" ? 400 : 10);
        if (s.max_depth > 0) p.max_depth = s.max_depth;
        p.jobs = s.jobs;
        return s.kind == "forest" ? train_random_forest(data, p, s.seed)
                                  : train_bagging(data, p, s.seed);
    }
    if (s.kind == "knn") return train_knn(data, KnnParams{s.neighbors}, s.seed);
    if (s.kind == "svm") {
        SvmParams p;
        p.max_iter = s.max_iter;
        return train_linear_svm(data, p, s.seed);
    }
    if (s.kind == "gbt") {
        GbtParams p;
        p.n_estimators = s.estimators > 0 ? s.estimators : 400;
        p.max_depth = s.max_depth > 0 ? s.max_depth : 9;
        p.learning_rate = s.learning_rate;
        p.jobs = s.jobs;
        return train_gbt(data, p, s.seed);
    }
    throw UsageError("unknown --model-kind '" + s.kind +
                     "' (tree|forest|bagging|knn|svm|gbt|neural)");
}

std::unique_ptr<Model> train_neural_model(const TrainSettings& s,
                                          const std::vector<CodeSample>& samples) {
    std::vector<std::string> label_names;
    for (const auto& x : samples) label_names.push_back(x.author);
    std::sort(label_names.begin(), label_names.end());
    label_names.erase(std::unique(label_names.begin(), label_names.end()),
                      label_names.end());
    if (label_names.size() < 2) {
        throw DataError("neural training needs at least 2 authors");
    }

    std::vector<std::string> sources;
    for (const auto& x : samples) {
        sources.push_back(s.with_comments ? x.code : strip_comments(x.code));
    }
    TokenizerVocab vocab = TokenizerVocab::build(sources);

    EncoderConfig cfg;
    cfg.vocab_size = vocab.size();
    cfg.max_tokens = s.max_tokens;
    cfg.embed_dim = s.embed_dim;
    cfg.layers = s.layers;
    cfg.heads = s.heads;
    cfg.classes = static_cast<int>(label_names.size());
    NeuralNet net(cfg);
    Rng init = Rng::keyed(s.seed, 1);
    net.init_params(init);

    std::vector<std::vector<int>> sequences;
    std::vector<int> labels;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sequences.push_back(vocab.encode(sources[i], cfg.max_tokens));
        labels.push_back(static_cast<int>(
            std::lower_bound(label_names.begin(), label_names.end(),
                             samples[i].author) -
            label_names.begin()));
    }

    NeuralTrainOptions options;
    options.epochs = s.epochs;
    options.learning_rate = s.neural_lr;
    options.batch_size = s.batch_size;
    NeuralTrainResult result = train_neural(net, sequences, labels, options,
                                            s.seed);
    std::cout << "final epoch mean loss: " << result.loss_trace.back()
              << "\n";

    auto model = std::make_unique<NeuralModel>(std::move(net), std::move(vocab));
    model->label_names = label_names;
    model->train_seed = s.seed;
    model->hyperparameters = {{"epochs", s.epochs},
                              {"learning_rate", s.neural_lr},
                              {"embed_dim", s.embed_dim},
                              {"layers", s.layers},
                              {"heads", s.heads},
                              {"max_tokens", s.max_tokens},
                              {"batch_size", s.batch_size},
                              {"with_comments", s.with_comments}};
    return model;
}

TrainerFn trainer_fn(const TrainSettings& s) {
    return [s](const LabeledMatrix& data) { return train_classical(s, data); };
}

std::string key_parameters_of(const Model& model) {
    std::string out;
    for (auto it = model.hyperparameters.begin();
         it != model.hyperparameters.end(); ++it) {
        if (!out.empty()) out += ", ";
        out += it.key() + ": " + it.value().dump();
    }
    return out;
}

void write_report(const EvalReport& report, const std::string& out_dir,
                  const std::string& model_name, std::uint64_t seed,
                  bool with_comments, const std::string& key_parameters,
                  double seconds) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    nlohmann::json j = report_to_json(report);
    j["seed"] = seed;
    j["model"] = model_name;
    j["with_comments"] = with_comments;
    write_file(fs::path(out_dir) / "report.json", j.dump(1) + "\n");
    write_file(fs::path(out_dir) / "confusion.csv",
               confusion_csv(report.matrix));
    write_file(fs::path(out_dir) / "report.txt",
               report_table(model_name, report, seconds, with_comments,
                            key_parameters));
    std::cout << report_table(model_name, report, seconds, with_comments,
                              key_parameters);
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"stylometric authorship attribution for C source code"};
    app.require_subcommand(1);

    // ---- templates ----
    auto* templates_cmd = app.add_subcommand(
        "templates", "count or expand parameterized task templates");
    templates_cmd->require_subcommand(1);
    std::string tpl_file;
    auto* tpl_count = templates_cmd->add_subcommand(
        "count", "print the total number of distinct prompt instances");
    tpl_count->add_option("-f,--file", tpl_file, "template JSONL file")
        ->required();
    tpl_count->callback([&]() {
        std::cout << total_instances(read_templates(tpl_file)) << "\n";
    });

    std::uint64_t tpl_q = 0;
    std::uint64_t tpl_seed = 42;
    std::string tpl_out;
    auto* tpl_expand = templates_cmd->add_subcommand(
        "expand", "sample distinct prompt instances round-robin");
    tpl_expand->add_option("-f,--file", tpl_file, "template JSONL file")
        ->required();
    tpl_expand->add_option("-n,--count", tpl_q, "instances to create")
        ->required();
    tpl_expand->add_option("--seed", tpl_seed, "sampling seed")->capture_default_str();
    tpl_expand->add_option("-o,--output", tpl_out, "prompt JSONL output")
        ->required();
    tpl_expand->callback([&]() {
        auto instances = expand(read_templates(tpl_file), tpl_q, tpl_seed);
        write_file(tpl_out, instances_to_jsonl(instances));
        std::cout << "wrote " << instances.size() << " instances to "
                  << tpl_out << " (seed " << tpl_seed << ")\n";
    });

    // ---- generate ----
    auto* gen_cmd = app.add_subcommand(
        "generate", "generate C programs for prompts via a chat API");
    std::string gen_prompts, gen_out, gen_model;
    GenerationSettings gen_settings;
    bool yes_network = false;
    int gen_jobs = 1;
    gen_cmd->add_option("-f,--file", gen_prompts, "prompt JSONL file")
        ->required();
    gen_cmd->add_option("--model", gen_model, "model name to request")
        ->required();
    gen_cmd->add_option("--endpoint", gen_settings.endpoint,
                        "API base, e.g. https://openrouter.ai");
    gen_cmd->add_option("--path", gen_settings.path,
                        "chat completions path")->capture_default_str();
    gen_cmd->add_option("--retries", gen_settings.max_retries,
                        "retry budget for 429/5xx")->capture_default_str();
    gen_cmd->add_option("--timeout", gen_settings.timeout_seconds,
                        "per-request timeout seconds")->capture_default_str();
    gen_cmd->add_option("--jobs", gen_jobs, "parallel requests")->capture_default_str();
    gen_cmd->add_flag("--yes-network", yes_network,
                      "acknowledge this command performs network calls");
    gen_cmd->add_option("-o,--output", gen_out, "sample JSONL output")
        ->required();
    gen_cmd->callback([&]() {
        if (!yes_network) {
            throw UsageError(
                "generate is the only networked command; pass --yes-network "
                "to confirm");
        }
        const char* key = std::getenv("STYLOC_API_KEY");
        gen_settings.api_key = key ? key : "";
        gen_settings.model = gen_model;
        HttpChatClient client(gen_settings);
        auto instances = instances_from_jsonl(read_file(gen_prompts));
        std::vector<CodeSample> samples(instances.size());
        std::atomic<std::size_t> cursor{0};
        std::atomic<bool> failed{false};
        std::string first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= instances.size() || failed.load()) return;
                try {
                    samples[i] = generate(client, instances[i], gen_model);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) first_error = e.what();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < std::max(1, gen_jobs); ++j) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) th.join();
        if (failed.load()) throw ExternalToolError(first_error);
        std::sort(samples.begin(), samples.end(),
                  [](const CodeSample& a, const CodeSample& b) {
                      return a.id < b.id;
                  });
        write_samples(gen_out, samples);
        std::cout << "wrote " << samples.size() << " samples to " << gen_out
                  << "\n";
    });

    // ---- ingest ----
    auto* ingest_cmd = app.add_subcommand(
        "ingest", "load a benchmark (author directories of .c, or .jsonl)");
    std::string ingest_path, ingest_out;
    ingest_cmd->add_option("path", ingest_path, "benchmark path")->required();
    ingest_cmd->add_option("-o,--output", ingest_out, "sample JSONL output")
        ->required();
    ingest_cmd->callback([&]() {
        auto samples = ingest_benchmark(ingest_path);
        write_samples(ingest_out, samples);
        std::cout << "ingested " << samples.size() << " samples\n";
    });

    // ---- validate ----
    auto* validate_cmd = app.add_subcommand(
        "validate", "compile-check samples (compile-only, no linking)");
    std::string val_in, val_out;
    std::string compiler_cmd = "cc -c -x c";
    double compile_timeout = 15.0;
    int val_jobs = 1;
    validate_cmd->add_option("-f,--file", val_in, "sample JSONL input")
        ->required();
    validate_cmd->add_option("-o,--output", val_out, "sample JSONL output")
        ->required();
    validate_cmd->add_option("--compiler", compiler_cmd,
                             "compiler command")->capture_default_str();
    validate_cmd->add_option("--timeout", compile_timeout,
                             "seconds per sample")->capture_default_str();
    validate_cmd->add_option("--jobs", val_jobs, "worker pool width")->capture_default_str();
    validate_cmd->callback([&]() {
        auto samples = read_samples(val_in);
        CompilerConfig cfg =
            compiler_config_from_command(compiler_cmd, compile_timeout);
        validate_samples(samples, cfg, val_jobs);
        // flag samples the feature extractor cannot fully use; balance
        // drops flagged samples later
        for (CodeSample& s : samples) {
            FeatureExtraction probe = extract_features(s.code, true);
            if (!probe.parsed_fully) s.flags.insert(flags::kUnparseable);
            if (!probe.has_functions) s.flags.insert(flags::kNoFunctions);
        }
        std::sort(samples.begin(), samples.end(),
                  [](const CodeSample& a, const CodeSample& b) {
                      return a.id < b.id;
                  });
        std::size_t ok = 0, flagged = 0;
        for (const auto& s : samples) {
            ok += s.compiled.value_or(false);
            flagged += !s.flags.empty();
        }
        write_samples(val_out, samples);
        std::cout << ok << "/" << samples.size() << " samples compiled, "
                  << flagged << " flagged\n";
    });

    // ---- dedup / balance / split ----
    auto* dedup_cmd =
        app.add_subcommand("dedup", "drop byte-identical duplicate programs");
    std::string dd_in, dd_out;
    dedup_cmd->add_option("-f,--file", dd_in, "sample JSONL input")->required();
    dedup_cmd->add_option("-o,--output", dd_out, "sample JSONL output")
        ->required();
    dedup_cmd->callback([&]() {
        auto samples = read_samples(dd_in);
        auto out = dedup(samples);
        write_samples(dd_out, out);
        std::cout << "kept " << out.size() << " of " << samples.size()
                  << " samples\n";
    });

    auto* balance_cmd = app.add_subcommand(
        "balance", "equalize per-author counts over valid samples");
    std::string bal_in, bal_out;
    std::uint64_t bal_seed = 42;
    balance_cmd->add_option("-f,--file", bal_in, "sample JSONL input")
        ->required();
    balance_cmd->add_option("-o,--output", bal_out, "sample JSONL output")
        ->required();
    balance_cmd->add_option("--seed", bal_seed, "drop-selection seed")->capture_default_str();
    balance_cmd->callback([&]() {
        auto out = balance(read_samples(bal_in), bal_seed);
        write_samples(bal_out, out);
        std::cout << "balanced to " << out.size() << " samples (seed "
                  << bal_seed << ")\n";
    });

    auto* split_cmd = app.add_subcommand(
        "split", "stratified train/validation split");
    std::string split_in, split_dir;
    double split_ratio = 0.8;
    std::uint64_t split_seed = 42;
    split_cmd->add_option("-f,--file", split_in, "sample JSONL input")
        ->required();
    split_cmd->add_option("-o,--output", split_dir, "output directory")
        ->required();
    split_cmd->add_option("--ratio", split_ratio, "train fraction")->capture_default_str();
    split_cmd->add_option("--seed", split_seed, "shuffle seed")->capture_default_str();
    split_cmd->callback([&]() {
        DatasetSplit parts = split(read_samples(split_in), split_ratio,
                                   split_seed);
        namespace fs = std::filesystem;
        fs::create_directories(split_dir);
        write_samples((fs::path(split_dir) / "train.jsonl").string(),
                      parts.train);
        write_samples((fs::path(split_dir) / "validation.jsonl").string(),
                      parts.validation);
        nlohmann::json manifest = {{"seed", parts.seed},
                                   {"ratio", parts.ratio},
                                   {"train", parts.train.size()},
                                   {"validation", parts.validation.size()}};
        write_file(fs::path(split_dir) / "split.json",
                   manifest.dump(1) + "\n");
        std::cout << "train " << parts.train.size() << " / validation "
                  << parts.validation.size() << " (seed " << split_seed
                  << ")\n";
    });

    // ---- features ----
    auto* features_cmd = app.add_subcommand(
        "features", "extract the fixed-layout feature matrix as CSV");
    std::string feat_in, feat_out;
    bool feat_no_comments = false, feat_tolerant = false, feat_skip = false;
    features_cmd->add_option("-f,--file", feat_in, "sample JSONL input")
        ->required();
    features_cmd->add_option("-o,--output", feat_out, "CSV output")
        ->required();
    features_cmd->add_flag("--no-comments", feat_no_comments,
                           "strip comments and zero comment features");
    features_cmd->add_flag("--tolerant", feat_tolerant,
                           "keep partially parsed samples");
    features_cmd->add_flag("--skip-unparseable", feat_skip,
                           "drop samples that fail to parse");
    features_cmd->callback([&]() {
        auto samples = read_samples(feat_in);
        std::size_t skipped = 0;
        FeatureTable table = features_from_samples(
            samples, !feat_no_comments, feat_tolerant, feat_skip, &skipped);
        write_file(feat_out, feature_csv(table));
        std::cout << "wrote " << table.rows.size() << " rows x "
                  << table.names.size() << " features";
        if (skipped > 0) std::cout << " (skipped " << skipped << ")";
        std::cout << "\n";
    });

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train a classifier");
    TrainSettings ts;
    std::string train_features, train_samples, train_out;
    bool train_no_comments = false;
    train_cmd->add_option("--features", train_features,
                          "training feature CSV (classical models)");
    train_cmd->add_option("--samples", train_samples,
                          "training sample JSONL (neural model)");
    train_cmd->add_option("--model-kind", ts.kind,
                          "tree|forest|bagging|knn|svm|gbt|neural")->capture_default_str();
    train_cmd->add_option("-o,--output", train_out, "model file")->required();
    train_cmd->add_option("--seed", ts.seed, "training seed")->capture_default_str();
    train_cmd->add_option("--max-depth", ts.max_depth, "tree depth limit");
    train_cmd->add_option("--estimators", ts.estimators, "ensemble size");
    train_cmd->add_option("--neighbors", ts.neighbors, "KNN neighbors")->capture_default_str();
    train_cmd->add_option("--max-iter", ts.max_iter, "SVM epochs")->capture_default_str();
    train_cmd->add_option("--learning-rate", ts.learning_rate,
                          "GBT shrinkage")->capture_default_str();
    train_cmd->add_option("--jobs", ts.jobs, "parallel tree training")->capture_default_str();
    train_cmd->add_flag("--no-comments", train_no_comments,
                        "record/train for the comment-stripped condition");
    train_cmd->add_option("--epochs", ts.epochs, "neural epochs")->capture_default_str();
    train_cmd->add_option("--embed-dim", ts.embed_dim, "neural width")->capture_default_str();
    train_cmd->add_option("--layers", ts.layers, "encoder blocks")->capture_default_str();
    train_cmd->add_option("--heads", ts.heads, "attention heads")->capture_default_str();
    train_cmd->add_option("--max-tokens", ts.max_tokens,
                          "sequence truncation")->capture_default_str();
    train_cmd->add_option("--batch-size", ts.batch_size, "minibatch")->capture_default_str();
    train_cmd->add_option("--neural-lr", ts.neural_lr,
                          "neural learning rate")->capture_default_str();
    train_cmd->callback([&]() {
        ts.with_comments = !train_no_comments;
        Timer timer;
        std::unique_ptr<Model> model;
        if (ts.kind == "neural") {
            if (train_samples.empty()) {
                throw UsageError("neural training needs --samples");
            }
            model = train_neural_model(ts, read_samples(train_samples));
        } else {
            if (train_features.empty()) {
                throw UsageError("classical training needs --features");
            }
            FeatureTable table = parse_feature_csv(read_file(train_features));
            model = train_classical(ts, matrix_from_table(table));
            model->hyperparameters["with_comments"] = ts.with_comments;
        }
        save_model(*model, train_out);
        std::cout << "trained " << model_kind_name(model->kind()) << " on "
                  << model->label_names.size() << " authors in "
                  << timer.seconds() << "s (seed " << ts.seed << ") -> "
                  << train_out << "\n";
    });

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand(
        "eval", "evaluate a model and export the report");
    std::string eval_model, eval_features, eval_samples_path, eval_out;
    bool eval_no_comments = false;
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--features", eval_features,
                         "validation feature CSV");
    eval_cmd->add_option("--samples", eval_samples_path,
                         "validation sample JSONL");
    eval_cmd->add_option("-o,--output", eval_out, "report directory")
        ->required();
    eval_cmd->add_flag("--no-comments", eval_no_comments,
                       "evaluate the comment-stripped condition");
    eval_cmd->callback([&]() {
        auto model = load_model(eval_model);
        Timer timer;
        EvalReport report;
        if (!eval_features.empty()) {
            report = evaluate_features(
                *model, parse_feature_csv(read_file(eval_features)));
        } else if (!eval_samples_path.empty()) {
            bool with_comments = !eval_no_comments &&
                                 model->hyperparameters.value("with_comments",
                                                              true);
            report = evaluate_samples(*model, read_samples(eval_samples_path),
                                      with_comments);
        } else {
            throw UsageError("eval needs --features or --samples");
        }
        write_report(report, eval_out, model_kind_name(model->kind()),
                     model->train_seed, !eval_no_comments,
                     key_parameters_of(*model), timer.seconds());
    });

    // ---- curve ----
    auto* curve_cmd = app.add_subcommand(
        "curve", "macro-F1 learning curve over per-author sample sizes");
    TrainSettings cs;
    std::string curve_train, curve_val, curve_out;
    std::vector<std::size_t> curve_sizes;
    curve_cmd->add_option("--features", curve_train, "training feature CSV")
        ->required();
    curve_cmd->add_option("--val", curve_val, "validation feature CSV")
        ->required();
    curve_cmd->add_option("--sizes", curve_sizes,
                          "per-author training sizes")
        ->required()
        ->delimiter(',');
    curve_cmd->add_option("--model-kind", cs.kind, "classical model kind")->capture_default_str();
    curve_cmd->add_option("--seed", cs.seed, "subsample seed")->capture_default_str();
    curve_cmd->add_option("--estimators", cs.estimators, "ensemble size");
    curve_cmd->add_option("--max-depth", cs.max_depth, "tree depth limit");
    curve_cmd->add_option("--jobs", cs.jobs, "parallel tree training")->capture_default_str();
    curve_cmd->add_option("-o,--output", curve_out, "curve JSON output")
        ->required();
    curve_cmd->callback([&]() {
        FeatureTable train_table = parse_feature_csv(read_file(curve_train));
        FeatureTable val_table = parse_feature_csv(read_file(curve_val));
        auto points = learning_curve(trainer_fn(cs), train_table, val_table,
                                     curve_sizes, cs.seed);
        nlohmann::json j;
        j["seed"] = cs.seed;
        j["model_kind"] = cs.kind;
        j["points"] = nlohmann::json::array();
        for (const auto& p : points) {
            j["points"].push_back({{"size", p.size}, {"macro_f1", p.macro_f1}});
            std::cout << p.size << " samples/author -> macro F1 "
                      << p.macro_f1 << "\n";
        }
        write_file(curve_out, j.dump(1) + "\n");
    });

    // ---- ablate ----
    auto* ablate_cmd = app.add_subcommand(
        "ablate", "paired with/without-comment evaluation");
    TrainSettings as;
    std::string ablate_in, ablate_out;
    double ablate_ratio = 0.8;
    ablate_cmd->add_option("-f,--file", ablate_in, "sample JSONL input")
        ->required();
    ablate_cmd->add_option("-o,--output", ablate_out, "report directory")
        ->required();
    ablate_cmd->add_option("--model-kind", as.kind, "classical model kind")->capture_default_str();
    ablate_cmd->add_option("--ratio", ablate_ratio, "train fraction")->capture_default_str();
    ablate_cmd->add_option("--seed", as.seed, "split seed")->capture_default_str();
    ablate_cmd->add_option("--estimators", as.estimators, "ensemble size");
    ablate_cmd->add_option("--max-depth", as.max_depth, "tree depth limit");
    ablate_cmd->add_option("--jobs", as.jobs, "parallel tree training")->capture_default_str();
    ablate_cmd->callback([&]() {
        auto samples = read_samples(ablate_in);
        AblationResult result = comment_ablation(trainer_fn(as), samples,
                                                 ablate_ratio, as.seed);
        namespace fs = std::filesystem;
        fs::create_directories(ablate_out);
        nlohmann::json j = {{"seed", as.seed},
                            {"model_kind", as.kind},
                            {"with_comments", report_to_json(result.with_comments)},
                            {"without_comments",
                             report_to_json(result.without_comments)}};
        write_file(fs::path(ablate_out) / "ablation.json", j.dump(1) + "\n");
        std::cout << "with comments:    accuracy "
                  << result.with_comments.accuracy << "\n";
        std::cout << "without comments: accuracy "
                  << result.without_comments.accuracy << "\n";
    });

    // ---- attribute ----
    auto* attr_cmd = app.add_subcommand(
        "attribute", "score a single C file against every known author");
    std::string attr_file, attr_model;
    attr_cmd->add_option("file", attr_file, "C source file")->required();
    attr_cmd->add_option("--model", attr_model, "model file")->required();
    attr_cmd->callback([&]() {
        auto model = load_model(attr_model);
        std::string source = read_file(attr_file);
        bool with_comments =
            model->hyperparameters.value("with_comments", true);
        std::vector<double> scores;
        if (model->kind() == ModelKind::NeuralHead) {
            scores = model->score_source(
                with_comments ? source : strip_comments(source));
        } else {
            FeatureVector fv = feature_vector(source, with_comments, true);
            scores = model->score(fv.values);
        }
        std::vector<std::size_t> order(scores.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return scores[a] > scores[b];
                         });
        for (std::size_t i : order) {
            std::cout << model->label_names[i] << "\t"
                      << format_double(scores[i]) << "\n";
        }
    });

    // ---- report ----
    auto* report_cmd = app.add_subcommand(
        "report", "render a saved report as a plain-text table");
    std::string report_file, report_name = "model", report_params;
    double report_time = 0.0;
    bool report_no_comments = false;
    report_cmd->add_option("-f,--file", report_file, "report.json file")
        ->required();
    report_cmd->add_option("--model-name", report_name, "row label")->capture_default_str();
    report_cmd->add_option("--params", report_params, "key parameters column");
    report_cmd->add_option("--time", report_time, "training seconds")->capture_default_str();
    report_cmd->add_flag("--no-comments", report_no_comments,
                         "mark the comments column as absent");
    report_cmd->callback([&]() {
        nlohmann::json j = nlohmann::json::parse(read_file(report_file));
        ConfusionMatrix matrix;
        matrix.label_names = j.at("confusion").at("labels")
                                 .get<std::vector<std::string>>();
        matrix.counts = j.at("confusion").at("counts")
                            .get<std::vector<std::vector<std::size_t>>>();
        EvalReport rep = report_from_confusion(std::move(matrix));
        std::cout << report_table(report_name, rep, report_time,
                                  !report_no_comments, report_params);
        for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
            const auto& m = rep.per_class[c];
            std::cout << "  " << rep.matrix.label_names[c] << ": precision "
                      << m.precision << ", recall " << m.recall << ", f1 "
                      << m.f1 << ", support " << m.support << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage error
    }
    return 0;
}

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const ExternalToolError& e) {
        std::cerr << "external tool error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
