#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "styloc/model.hpp"
#include "styloc/rng.hpp"

namespace styloc {

double gelu(double x);        // tanh approximation
double gelu_grad(double x);

struct EncoderConfig {
    int vocab_size = 0;
    int max_tokens = 512;
    int embed_dim = 64;
    int layers = 2;
    int heads = 4;
    int head_hidden = 0;  // 0 resolves to embed_dim / 2
    int ffn_hidden = 0;   // 0 resolves to 2 * embed_dim
    double dropout_p = 0.2;
    int classes = 0;

    void resolve();  // fills defaults, validates divisibility and bounds
};

// Word-level tokenizer over c_frontend tokens plus PAD/UNK/BOS specials;
// BOS occupies position 0 of every encoded sequence.
struct TokenizerVocab {
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kBos = 2;

    std::vector<std::string> tokens;  // id -> text; first three are specials
    std::unordered_map<std::string, int> ids;

    static TokenizerVocab build(const std::vector<std::string>& sources,
                                std::size_t max_size = 20000);
    std::vector<int> encode(const std::string& source, int max_tokens) const;
    int size() const { return static_cast<int>(tokens.size()); }

    nlohmann::json to_json() const;
    static TokenizerVocab from_json(const nlohmann::json& j);
};

// Bidirectional self-attention encoder with learned positions and the
// pool-first-token -> linear -> GELU -> dropout -> linear -> softmax head.
// Everything runs in double precision; backprop is hand-written.
class NeuralNet {
public:
    explicit NeuralNet(EncoderConfig config);
    NeuralNet(NeuralNet&&) noexcept;
    NeuralNet& operator=(NeuralNet&&) noexcept;
    ~NeuralNet();

    void init_params(Rng& rng, double scale = 0.02);
    void zero_params();

    // (len x d) hidden states; deterministic, ids must be < vocab_size.
    Eigen::MatrixXd encode(const std::vector<int>& ids) const;

    // softmax probabilities from hidden states; dropout only in train mode.
    std::vector<double> classify(const Eigen::MatrixXd& hidden,
                                 bool train_mode, Rng* rng) const;
    std::vector<double> classify_logits(const Eigen::MatrixXd& hidden,
                                        bool train_mode, Rng* rng) const;

    std::vector<double> probabilities(const std::vector<int>& ids) const;

    // forward + backward for one sample; returns the cross-entropy loss and
    // accumulates parameter gradients (scaled by `grad_scale`).
    double train_step(const std::vector<int>& ids, int label, bool train_mode,
                      Rng* dropout_rng, double grad_scale);

    void zero_grads();
    void apply_sgd_momentum(double lr, double momentum);

    // flat views over every parameter/gradient tensor, fixed order
    std::vector<double*> param_data();
    std::vector<double*> grad_data();
    std::vector<std::size_t> param_sizes() const;

    const EncoderConfig& config() const { return config_; }

    nlohmann::json params_to_json() const;
    void params_from_json(const nlohmann::json& j);

private:
    struct Layer {
        Eigen::MatrixXd wq, wk, wv, wo;          // d x d
        Eigen::VectorXd bq, bk, bv, bo;          // d
        Eigen::VectorXd ln1_g, ln1_b, ln2_g, ln2_b;
        Eigen::MatrixXd ff1;                     // d x ffn
        Eigen::VectorXd ff1_b;                   // ffn
        Eigen::MatrixXd ff2;                     // ffn x d
        Eigen::VectorXd ff2_b;                   // d
    };
    struct Grads;  // mirrors the parameter layout

    EncoderConfig config_;
    Eigen::MatrixXd token_embed_;  // vocab x d
    Eigen::MatrixXd pos_embed_;    // max_tokens x d
    std::vector<Layer> layers_;
    Eigen::MatrixXd head_w1_;  // d x head_hidden
    Eigen::VectorXd head_b1_;
    Eigen::MatrixXd head_w2_;  // head_hidden x classes
    Eigen::VectorXd head_b2_;

    std::unique_ptr<Grads> grads_;
    std::unique_ptr<Grads> momentum_;

    friend struct NeuralForward;
};

struct NeuralTrainOptions {
    int epochs = 200;
    double learning_rate = 0.05;
    double momentum = 0.9;
    int batch_size = 8;
};

struct NeuralTrainResult {
    std::vector<double> loss_trace;  // mean loss per epoch
};

// Minibatch cross-entropy with SGD + momentum; seeded shuffling and dropout.
// Throws DataError if the loss stops being finite.
NeuralTrainResult train_neural(NeuralNet& net,
                               const std::vector<std::vector<int>>& sequences,
                               const std::vector<int>& labels,
                               const NeuralTrainOptions& options,
                               std::uint64_t seed);

// Central-difference check of every parameter gradient on a tiny seeded
// problem with dropout disabled; returns the max relative error.
double grad_check(EncoderConfig config, std::uint64_t seed);

class NeuralModel : public Model {
public:
    NeuralModel() : net_(EncoderConfig{}) {}
    explicit NeuralModel(NeuralNet net, TokenizerVocab vocab)
        : net_(std::move(net)), vocab_(std::move(vocab)) {}

    ModelKind kind() const override { return ModelKind::NeuralHead; }
    std::vector<double> score(const std::vector<double>& x) const override;
    std::vector<double> score_source(const std::string& source) const override;
    nlohmann::json payload_to_json() const override;
    static std::unique_ptr<NeuralModel> from_payload(const nlohmann::json& j);

    const NeuralNet& net() const { return net_; }
    const TokenizerVocab& vocab() const { return vocab_; }

private:
    NeuralNet net_;
    TokenizerVocab vocab_;
};

}  // namespace styloc
