#include "styloc/neural.hpp"

#include <cmath>

#include "styloc/ioutil.hpp"
#include "styloc/token.hpp"

namespace styloc {

namespace {
constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
}  // namespace

double gelu(double x) {
    double u = kGeluC * (x + 0.044715 * x * x * x);
    return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_grad(double x) {
    double u = kGeluC * (x + 0.044715 * x * x * x);
    double t = std::tanh(u);
    double du = kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

void EncoderConfig::resolve() {
    if (head_hidden == 0) head_hidden = embed_dim / 2;
    if (ffn_hidden == 0) ffn_hidden = 2 * embed_dim;
    if (embed_dim <= 0 || heads <= 0 || embed_dim % heads != 0) {
        throw DataError("encoder config: embed_dim must divide by heads");
    }
    if (max_tokens < 1) throw DataError("encoder config: max_tokens must be >= 1");
    if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
        throw DataError("encoder config: dropout_p must be in [0, 1)");
    }
    if (vocab_size < 3) throw DataError("encoder config: vocabulary too small");
    if (classes < 2) throw DataError("encoder config: need at least 2 classes");
    if (head_hidden < 1 || ffn_hidden < 1) {
        throw DataError("encoder config: hidden widths must be positive");
    }
}

// ---- tokenizer vocabulary --------------------------------------------------

TokenizerVocab TokenizerVocab::build(const std::vector<std::string>& sources,
                                     std::size_t max_size) {
    TokenizerVocab v;
    v.tokens = {"<pad>", "<unk>", "<bos>"};
    std::unordered_map<std::string, std::size_t> counts;
    std::vector<std::string> order;  // first-seen order for stable ties
    for (const std::string& src : sources) {
        for (const Token& t : tokenize(src)) {
            auto [it, inserted] = counts.try_emplace(t.text, 0);
            if (inserted) order.push_back(t.text);
            ++it->second;
        }
    }
    std::vector<std::size_t> idx(order.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return counts[order[a]] > counts[order[b]];
    });
    for (std::size_t i : idx) {
        if (v.tokens.size() >= max_size) break;
        v.tokens.push_back(order[i]);
    }
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        v.ids[v.tokens[i]] = static_cast<int>(i);
    }
    return v;
}

std::vector<int> TokenizerVocab::encode(const std::string& source,
                                        int max_tokens) const {
    std::vector<int> out = {kBos};
    for (const Token& t : tokenize(source)) {
        if (static_cast<int>(out.size()) >= max_tokens) break;
        auto it = ids.find(t.text);
        out.push_back(it == ids.end() ? kUnk : it->second);
    }
    return out;
}

nlohmann::json TokenizerVocab::to_json() const { return {{"tokens", tokens}}; }

TokenizerVocab TokenizerVocab::from_json(const nlohmann::json& j) {
    TokenizerVocab v;
    v.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        v.ids[v.tokens[i]] = static_cast<int>(i);
    }
    return v;
}

// ---- parameter plumbing ----------------------------------------------------

struct NeuralNet::Grads {
    Eigen::MatrixXd token_embed, pos_embed;
    std::vector<Layer> layers;
    Eigen::MatrixXd head_w1;
    Eigen::VectorXd head_b1;
    Eigen::MatrixXd head_w2;
    Eigen::VectorXd head_b2;
};

NeuralNet::NeuralNet(NeuralNet&&) noexcept = default;
NeuralNet& NeuralNet::operator=(NeuralNet&&) noexcept = default;
NeuralNet::~NeuralNet() = default;

namespace {

template <typename Net, typename F>
void visit_layer(Net& l, F&& f) {
    f(l.wq); f(l.wk); f(l.wv); f(l.wo);
    f(l.bq); f(l.bk); f(l.bv); f(l.bo);
    f(l.ln1_g); f(l.ln1_b); f(l.ln2_g); f(l.ln2_b);
    f(l.ff1); f(l.ff1_b); f(l.ff2); f(l.ff2_b);
}

}  // namespace

NeuralNet::NeuralNet(EncoderConfig config) : config_(std::move(config)) {
    if (config_.vocab_size > 0) {
        config_.resolve();
        const int d = config_.embed_dim;
        token_embed_.setZero(config_.vocab_size, d);
        pos_embed_.setZero(config_.max_tokens, d);
        layers_.resize(config_.layers);
        for (Layer& l : layers_) {
            l.wq.setZero(d, d); l.wk.setZero(d, d);
            l.wv.setZero(d, d); l.wo.setZero(d, d);
            l.bq.setZero(d); l.bk.setZero(d); l.bv.setZero(d); l.bo.setZero(d);
            l.ln1_g.setZero(d); l.ln1_b.setZero(d);
            l.ln2_g.setZero(d); l.ln2_b.setZero(d);
            l.ff1.setZero(d, config_.ffn_hidden);
            l.ff1_b.setZero(config_.ffn_hidden);
            l.ff2.setZero(config_.ffn_hidden, d);
            l.ff2_b.setZero(d);
        }
        head_w1_.setZero(d, config_.head_hidden);
        head_b1_.setZero(config_.head_hidden);
        head_w2_.setZero(config_.head_hidden, config_.classes);
        head_b2_.setZero(config_.classes);

        grads_ = std::make_unique<Grads>();
        grads_->token_embed = token_embed_;
        grads_->pos_embed = pos_embed_;
        grads_->layers = layers_;
        grads_->head_w1 = head_w1_;
        grads_->head_b1 = head_b1_;
        grads_->head_w2 = head_w2_;
        grads_->head_b2 = head_b2_;
        zero_grads();
    }
}

void NeuralNet::init_params(Rng& rng, double scale) {
    auto fill = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                m(r, c) = scale * rng.normal();
            }
        }
    };
    fill(token_embed_);
    fill(pos_embed_);
    for (Layer& l : layers_) {
        fill(l.wq); fill(l.wk); fill(l.wv); fill(l.wo);
        l.bq.setZero(); l.bk.setZero(); l.bv.setZero(); l.bo.setZero();
        l.ln1_g.setOnes(); l.ln1_b.setZero();
        l.ln2_g.setOnes(); l.ln2_b.setZero();
        fill(l.ff1); l.ff1_b.setZero();
        fill(l.ff2); l.ff2_b.setZero();
    }
    fill(head_w1_);
    head_b1_.setZero();
    fill(head_w2_);
    head_b2_.setZero();
}

void NeuralNet::zero_params() {
    auto zero = [](auto& t) { t.setZero(); };
    token_embed_.setZero();
    pos_embed_.setZero();
    for (Layer& l : layers_) visit_layer(l, zero);
    head_w1_.setZero();
    head_b1_.setZero();
    head_w2_.setZero();
    head_b2_.setZero();
}

std::vector<double*> NeuralNet::param_data() {
    std::vector<double*> out = {token_embed_.data(), pos_embed_.data()};
    for (Layer& l : layers_) {
        visit_layer(l, [&](auto& t) { out.push_back(t.data()); });
    }
    out.push_back(head_w1_.data());
    out.push_back(head_b1_.data());
    out.push_back(head_w2_.data());
    out.push_back(head_b2_.data());
    return out;
}

std::vector<double*> NeuralNet::grad_data() {
    std::vector<double*> out = {grads_->token_embed.data(),
                                grads_->pos_embed.data()};
    for (Layer& l : grads_->layers) {
        visit_layer(l, [&](auto& t) { out.push_back(t.data()); });
    }
    out.push_back(grads_->head_w1.data());
    out.push_back(grads_->head_b1.data());
    out.push_back(grads_->head_w2.data());
    out.push_back(grads_->head_b2.data());
    return out;
}

std::vector<std::size_t> NeuralNet::param_sizes() const {
    std::vector<std::size_t> out = {
        static_cast<std::size_t>(token_embed_.size()),
        static_cast<std::size_t>(pos_embed_.size())};
    for (const Layer& l : layers_) {
        visit_layer(l, [&](const auto& t) {
            out.push_back(static_cast<std::size_t>(t.size()));
        });
    }
    out.push_back(static_cast<std::size_t>(head_w1_.size()));
    out.push_back(static_cast<std::size_t>(head_b1_.size()));
    out.push_back(static_cast<std::size_t>(head_w2_.size()));
    out.push_back(static_cast<std::size_t>(head_b2_.size()));
    return out;
}

void NeuralNet::zero_grads() {
    auto zero = [](auto& t) { t.setZero(); };
    grads_->token_embed.setZero();
    grads_->pos_embed.setZero();
    for (Layer& l : grads_->layers) visit_layer(l, zero);
    grads_->head_w1.setZero();
    grads_->head_b1.setZero();
    grads_->head_w2.setZero();
    grads_->head_b2.setZero();
}

void NeuralNet::apply_sgd_momentum(double lr, double momentum) {
    if (!momentum_) {
        momentum_ = std::make_unique<Grads>(*grads_);
        auto zero = [](auto& t) { t.setZero(); };
        momentum_->token_embed.setZero();
        momentum_->pos_embed.setZero();
        for (Layer& l : momentum_->layers) visit_layer(l, zero);
        momentum_->head_w1.setZero();
        momentum_->head_b1.setZero();
        momentum_->head_w2.setZero();
        momentum_->head_b2.setZero();
    }
    std::vector<double*> params = param_data();
    std::vector<double*> grads = grad_data();
    std::vector<double*> vel = {momentum_->token_embed.data(),
                                momentum_->pos_embed.data()};
    for (Layer& l : momentum_->layers) {
        visit_layer(l, [&](auto& t) { vel.push_back(t.data()); });
    }
    vel.push_back(momentum_->head_w1.data());
    vel.push_back(momentum_->head_b1.data());
    vel.push_back(momentum_->head_w2.data());
    vel.push_back(momentum_->head_b2.data());

    std::vector<std::size_t> sizes = param_sizes();
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < sizes[t]; ++i) {
            vel[t][i] = momentum * vel[t][i] - lr * grads[t][i];
            params[t][i] += vel[t][i];
        }
    }
}

// ---- forward / backward ----------------------------------------------------

namespace {

struct LayerCache {
    Eigen::MatrixXd x;        // layer input
    Eigen::MatrixXd q, k, v;  // projections
    std::vector<Eigen::MatrixXd> attn;  // per head, rows softmaxed
    Eigen::MatrixXd concat;   // attention output before wo
    Eigen::MatrixXd r1;       // x + attn_out
    Eigen::MatrixXd y1;       // LN1(r1)
    Eigen::MatrixXd x1hat;    // normalized r1 (pre gamma/beta)
    Eigen::VectorXd inv_s1;   // per-row 1/std
    Eigen::MatrixXd f1;       // y1*ff1 + b
    Eigen::MatrixXd g;        // gelu(f1)
    Eigen::MatrixXd r2;       // y1 + ffn out
    Eigen::MatrixXd x2hat;
    Eigen::VectorXd inv_s2;
};

void layer_norm_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& gamma,
                     const Eigen::VectorXd& beta, Eigen::MatrixXd& y,
                     Eigen::MatrixXd& xhat, Eigen::VectorXd& inv_s) {
    const Eigen::Index n = x.rows(), d = x.cols();
    y.resize(n, d);
    xhat.resize(n, d);
    inv_s.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        double mu = x.row(r).mean();
        double var = (x.row(r).array() - mu).square().mean();
        double inv = 1.0 / std::sqrt(var + kLnEps);
        inv_s(r) = inv;
        xhat.row(r) = (x.row(r).array() - mu) * inv;
        y.row(r) = xhat.row(r).cwiseProduct(gamma.transpose()) +
                   beta.transpose();
    }
}

// dy -> dx for layer norm; accumulates gamma/beta grads.
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dy,
                                    const Eigen::MatrixXd& xhat,
                                    const Eigen::VectorXd& inv_s,
                                    const Eigen::VectorXd& gamma,
                                    Eigen::VectorXd& dgamma,
                                    Eigen::VectorXd& dbeta) {
    const Eigen::Index n = dy.rows(), d = dy.cols();
    Eigen::MatrixXd dx(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        dbeta += dy.row(r).transpose();
        dgamma += dy.row(r).cwiseProduct(xhat.row(r)).transpose();
        Eigen::RowVectorXd dxhat = dy.row(r).cwiseProduct(gamma.transpose());
        double m1 = dxhat.mean();
        double m2 = dxhat.cwiseProduct(xhat.row(r)).mean();
        dx.row(r) =
            (dxhat.array() - m1 - xhat.row(r).array() * m2) * inv_s(r);
    }
    return dx;
}

}  // namespace

struct NeuralForward {
    static Eigen::MatrixXd run(const NeuralNet& net,
                               const std::vector<int>& ids,
                               std::vector<LayerCache>* caches) {
        const EncoderConfig& cfg = net.config_;
        std::vector<int> seq = ids;
        if (static_cast<int>(seq.size()) > cfg.max_tokens) {
            seq.resize(cfg.max_tokens);
        }
        if (seq.empty()) throw DataError("encode: empty sequence");
        const Eigen::Index len = static_cast<Eigen::Index>(seq.size());
        const int d = cfg.embed_dim;
        const int h = cfg.heads;
        const int dh = d / h;
        const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

        Eigen::MatrixXd x(len, d);
        for (Eigen::Index t = 0; t < len; ++t) {
            if (seq[t] < 0 || seq[t] >= cfg.vocab_size) {
                throw DataError("encode: token id out of range");
            }
            x.row(t) = net.token_embed_.row(seq[t]) + net.pos_embed_.row(t);
        }

        for (int li = 0; li < cfg.layers; ++li) {
            const auto& L = net.layers_[li];
            LayerCache cache;
            cache.x = x;
            cache.q = (x * L.wq).rowwise() + L.bq.transpose();
            cache.k = (x * L.wk).rowwise() + L.bk.transpose();
            cache.v = (x * L.wv).rowwise() + L.bv.transpose();

            cache.concat.resize(len, d);
            cache.attn.resize(h);
            for (int head = 0; head < h; ++head) {
                auto qh = cache.q.middleCols(head * dh, dh);
                auto kh = cache.k.middleCols(head * dh, dh);
                auto vh = cache.v.middleCols(head * dh, dh);
                Eigen::MatrixXd scores = qh * kh.transpose() * inv_sqrt;
                for (Eigen::Index r = 0; r < len; ++r) {
                    double mx = scores.row(r).maxCoeff();
                    Eigen::RowVectorXd e =
                        (scores.row(r).array() - mx).exp();
                    scores.row(r) = e / e.sum();
                }
                cache.attn[head] = scores;
                cache.concat.middleCols(head * dh, dh) = scores * vh;
            }
            Eigen::MatrixXd attn_out =
                (cache.concat * L.wo).rowwise() + L.bo.transpose();
            cache.r1 = x + attn_out;
            layer_norm_rows(cache.r1, L.ln1_g, L.ln1_b, cache.y1, cache.x1hat,
                            cache.inv_s1);
            cache.f1 = (cache.y1 * L.ff1).rowwise() + L.ff1_b.transpose();
            cache.g = cache.f1.unaryExpr([](double v) { return gelu(v); });
            Eigen::MatrixXd f2 =
                (cache.g * L.ff2).rowwise() + L.ff2_b.transpose();
            cache.r2 = cache.y1 + f2;
            Eigen::MatrixXd y2;
            layer_norm_rows(cache.r2, L.ln2_g, L.ln2_b, y2, cache.x2hat,
                            cache.inv_s2);
            x = y2;
            if (caches) caches->push_back(std::move(cache));
        }
        return x;
    }
};

Eigen::MatrixXd NeuralNet::encode(const std::vector<int>& ids) const {
    return NeuralForward::run(*this, ids, nullptr);
}

std::vector<double> NeuralNet::classify_logits(const Eigen::MatrixXd& hidden,
                                               bool train_mode,
                                               Rng* rng) const {
    Eigen::VectorXd h0 = hidden.row(0).transpose();
    Eigen::VectorXd z1 = head_w1_.transpose() * h0 + head_b1_;
    Eigen::VectorXd g = z1.unaryExpr([](double v) { return gelu(v); });
    if (train_mode && config_.dropout_p > 0.0) {
        if (rng == nullptr) {
            throw DataError("classify: train mode needs a generator");
        }
        const double keep = 1.0 - config_.dropout_p;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            g(i) = rng->uniform() >= config_.dropout_p ? g(i) / keep : 0.0;
        }
    }
    Eigen::VectorXd z2 = head_w2_.transpose() * g + head_b2_;
    return std::vector<double>(z2.data(), z2.data() + z2.size());
}

std::vector<double> NeuralNet::classify(const Eigen::MatrixXd& hidden,
                                        bool train_mode, Rng* rng) const {
    return softmax(classify_logits(hidden, train_mode, rng));
}

std::vector<double> NeuralNet::probabilities(const std::vector<int>& ids) const {
    return classify(encode(ids), false, nullptr);
}

double NeuralNet::train_step(const std::vector<int>& ids, int label,
                             bool train_mode, Rng* dropout_rng,
                             double grad_scale) {
    const EncoderConfig& cfg = config_;
    const int d = cfg.embed_dim;
    const int h = cfg.heads;
    const int dh = d / h;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

    std::vector<LayerCache> caches;
    Eigen::MatrixXd hidden = NeuralForward::run(*this, ids, &caches);
    const Eigen::Index len = hidden.rows();

    // head forward with an explicit dropout mask for the backward pass
    Eigen::VectorXd h0 = hidden.row(0).transpose();
    Eigen::VectorXd z1 = head_w1_.transpose() * h0 + head_b1_;
    Eigen::VectorXd g = z1.unaryExpr([](double v) { return gelu(v); });
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(g.size());
    if (train_mode && cfg.dropout_p > 0.0) {
        if (dropout_rng == nullptr) {
            throw DataError("train_step: train mode needs a generator");
        }
        const double keep = 1.0 - cfg.dropout_p;
        for (Eigen::Index i = 0; i < mask.size(); ++i) {
            mask(i) = dropout_rng->uniform() >= cfg.dropout_p ? 1.0 / keep : 0.0;
        }
    }
    Eigen::VectorXd gd = g.cwiseProduct(mask);
    Eigen::VectorXd z2 = head_w2_.transpose() * gd + head_b2_;
    std::vector<double> p =
        softmax(std::vector<double>(z2.data(), z2.data() + z2.size()));
    double loss = -std::log(std::max(p[label], 1e-300));

    // head backward
    Eigen::VectorXd dz2(cfg.classes);
    for (int c = 0; c < cfg.classes; ++c) {
        dz2(c) = (p[c] - (c == label ? 1.0 : 0.0)) * grad_scale;
    }
    grads_->head_w2 += gd * dz2.transpose();
    grads_->head_b2 += dz2;
    Eigen::VectorXd dgd = head_w2_ * dz2;
    Eigen::VectorXd dg = dgd.cwiseProduct(mask);
    Eigen::VectorXd dz1(dg.size());
    for (Eigen::Index i = 0; i < dz1.size(); ++i) {
        dz1(i) = dg(i) * gelu_grad(z1(i));
    }
    grads_->head_w1 += h0 * dz1.transpose();
    grads_->head_b1 += dz1;
    Eigen::VectorXd dh0 = head_w1_ * dz1;

    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(len, d);
    dx.row(0) = dh0.transpose();

    for (int li = cfg.layers - 1; li >= 0; --li) {
        const Layer& L = layers_[li];
        Layer& G = grads_->layers[li];
        LayerCache& cache = caches[li];

        // x_out = LN2(r2)
        Eigen::MatrixXd dr2 = layer_norm_backward(dx, cache.x2hat,
                                                  cache.inv_s2, L.ln2_g,
                                                  G.ln2_g, G.ln2_b);
        // r2 = y1 + g*ff2 + b
        Eigen::MatrixXd dy1 = dr2;
        G.ff2 += cache.g.transpose() * dr2;
        G.ff2_b += dr2.colwise().sum().transpose();
        Eigen::MatrixXd dgm = dr2 * L.ff2.transpose();
        Eigen::MatrixXd df1 =
            dgm.cwiseProduct(cache.f1.unaryExpr(
                [](double v) { return gelu_grad(v); }));
        G.ff1 += cache.y1.transpose() * df1;
        G.ff1_b += df1.colwise().sum().transpose();
        dy1 += df1 * L.ff1.transpose();

        // y1 = LN1(r1)
        Eigen::MatrixXd dr1 = layer_norm_backward(dy1, cache.x1hat,
                                                  cache.inv_s1, L.ln1_g,
                                                  G.ln1_g, G.ln1_b);
        // r1 = x + concat*wo + bo
        Eigen::MatrixXd dx_in = dr1;
        G.wo += cache.concat.transpose() * dr1;
        G.bo += dr1.colwise().sum().transpose();
        Eigen::MatrixXd dconcat = dr1 * L.wo.transpose();

        Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(len, d);
        Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(len, d);
        Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(len, d);
        for (int head = 0; head < h; ++head) {
            auto qh = cache.q.middleCols(head * dh, dh);
            auto kh = cache.k.middleCols(head * dh, dh);
            auto vh = cache.v.middleCols(head * dh, dh);
            const Eigen::MatrixXd& a = cache.attn[head];
            Eigen::MatrixXd doh = dconcat.middleCols(head * dh, dh);
            Eigen::MatrixXd da = doh * vh.transpose();
            dv.middleCols(head * dh, dh) = a.transpose() * doh;
            // softmax backward per row
            Eigen::MatrixXd ds(len, len);
            for (Eigen::Index r = 0; r < len; ++r) {
                double dot = da.row(r).dot(a.row(r));
                ds.row(r) =
                    (a.row(r).array() * (da.row(r).array() - dot)).matrix();
            }
            ds *= inv_sqrt;
            dq.middleCols(head * dh, dh) = ds * kh;
            dk.middleCols(head * dh, dh) = ds.transpose() * qh;
        }
        G.wq += cache.x.transpose() * dq;
        G.bq += dq.colwise().sum().transpose();
        G.wk += cache.x.transpose() * dk;
        G.bk += dk.colwise().sum().transpose();
        G.wv += cache.x.transpose() * dv;
        G.bv += dv.colwise().sum().transpose();
        dx_in += dq * L.wq.transpose() + dk * L.wk.transpose() +
                 dv * L.wv.transpose();
        dx = std::move(dx_in);
    }

    std::vector<int> seq = ids;
    if (static_cast<int>(seq.size()) > cfg.max_tokens) {
        seq.resize(cfg.max_tokens);
    }
    for (Eigen::Index t = 0; t < len; ++t) {
        grads_->token_embed.row(seq[t]) += dx.row(t);
        grads_->pos_embed.row(t) += dx.row(t);
    }
    return loss;
}

NeuralTrainResult train_neural(NeuralNet& net,
                               const std::vector<std::vector<int>>& sequences,
                               const std::vector<int>& labels,
                               const NeuralTrainOptions& options,
                               std::uint64_t seed) {
    if (sequences.empty() || sequences.size() != labels.size()) {
        throw DataError("train_neural: bad dataset");
    }
    for (const auto& s : sequences) {
        if (s.empty()) throw DataError("train_neural: empty sequence");
    }
    NeuralTrainResult result;
    Rng rng = Rng::keyed(seed, 0);
    std::vector<std::size_t> idx(sequences.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    const int batch = std::max(1, options.batch_size);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(idx);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < idx.size();
             start += static_cast<std::size_t>(batch)) {
            std::size_t stop =
                std::min(idx.size(), start + static_cast<std::size_t>(batch));
            net.zero_grads();
            double scale = 1.0 / static_cast<double>(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                epoch_loss += net.train_step(sequences[idx[i]], labels[idx[i]],
                                             true, &rng, scale);
            }
            net.apply_sgd_momentum(options.learning_rate, options.momentum);
        }
        epoch_loss /= static_cast<double>(idx.size());
        if (!std::isfinite(epoch_loss)) {
            throw DataError(
                "train_neural: loss diverged (epoch " +
                std::to_string(epoch) + "); lower the learning rate");
        }
        result.loss_trace.push_back(epoch_loss);
    }
    return result;
}

double grad_check(EncoderConfig config, std::uint64_t seed) {
    config.dropout_p = 0.0;
    NeuralNet net(config);
    Rng rng = Rng::keyed(seed, 1);
    net.init_params(rng, 0.3);

    std::vector<int> ids = {TokenizerVocab::kBos};
    const int len = std::min(config.max_tokens, 6);
    for (int i = 1; i < len; ++i) {
        ids.push_back(static_cast<int>(rng.below(
            static_cast<std::uint64_t>(config.vocab_size))));
    }
    const int label = static_cast<int>(
        rng.below(static_cast<std::uint64_t>(net.config().classes)));

    net.zero_grads();
    net.train_step(ids, label, false, nullptr, 1.0);

    auto loss_at = [&]() {
        std::vector<double> p = net.probabilities(ids);
        return -std::log(std::max(p[label], 1e-300));
    };

    std::vector<double*> params = net.param_data();
    std::vector<double*> grads = net.grad_data();
    std::vector<std::size_t> sizes = net.param_sizes();

    const double h = 1e-4;
    double worst = 0.0;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < sizes[t]; ++i) {
            double saved = params[t][i];
            params[t][i] = saved + h;
            double up = loss_at();
            params[t][i] = saved - h;
            double down = loss_at();
            params[t][i] = saved;
            double fd = (up - down) / (2.0 * h);
            double an = grads[t][i];
            double denom = std::max({std::fabs(fd), std::fabs(an), 1e-8});
            double rel = std::fabs(fd - an) / denom;
            if (std::fabs(fd) < 1e-10 && std::fabs(an) < 1e-10) rel = 0.0;
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

// ---- persistence -----------------------------------------------------------

namespace {

nlohmann::json mat_json(const Eigen::MatrixXd& m) {
    return {{"r", m.rows()},
            {"c", m.cols()},
            {"v", std::vector<double>(m.data(), m.data() + m.size())}};
}

Eigen::MatrixXd mat_from(const nlohmann::json& j) {
    Eigen::MatrixXd m(j.at("r").get<Eigen::Index>(),
                      j.at("c").get<Eigen::Index>());
    auto v = j.at("v").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != m.size()) {
        throw DataError("model payload: bad tensor size");
    }
    std::copy(v.begin(), v.end(), m.data());
    return m;
}

nlohmann::json vec_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json NeuralNet::params_to_json() const {
    nlohmann::json j;
    j["config"] = {{"vocab_size", config_.vocab_size},
                   {"max_tokens", config_.max_tokens},
                   {"embed_dim", config_.embed_dim},
                   {"layers", config_.layers},
                   {"heads", config_.heads},
                   {"head_hidden", config_.head_hidden},
                   {"ffn_hidden", config_.ffn_hidden},
                   {"dropout_p", config_.dropout_p},
                   {"classes", config_.classes}};
    j["token_embed"] = mat_json(token_embed_);
    j["pos_embed"] = mat_json(pos_embed_);
    nlohmann::json layers = nlohmann::json::array();
    for (const Layer& l : layers_) {
        layers.push_back({{"wq", mat_json(l.wq)}, {"wk", mat_json(l.wk)},
                          {"wv", mat_json(l.wv)}, {"wo", mat_json(l.wo)},
                          {"bq", vec_json(l.bq)}, {"bk", vec_json(l.bk)},
                          {"bv", vec_json(l.bv)}, {"bo", vec_json(l.bo)},
                          {"ln1_g", vec_json(l.ln1_g)},
                          {"ln1_b", vec_json(l.ln1_b)},
                          {"ln2_g", vec_json(l.ln2_g)},
                          {"ln2_b", vec_json(l.ln2_b)},
                          {"ff1", mat_json(l.ff1)},
                          {"ff1_b", vec_json(l.ff1_b)},
                          {"ff2", mat_json(l.ff2)},
                          {"ff2_b", vec_json(l.ff2_b)}});
    }
    j["layers"] = std::move(layers);
    j["head_w1"] = mat_json(head_w1_);
    j["head_b1"] = vec_json(head_b1_);
    j["head_w2"] = mat_json(head_w2_);
    j["head_b2"] = vec_json(head_b2_);
    return j;
}

void NeuralNet::params_from_json(const nlohmann::json& j) {
    const auto& cj = j.at("config");
    EncoderConfig cfg;
    cfg.vocab_size = cj.at("vocab_size").get<int>();
    cfg.max_tokens = cj.at("max_tokens").get<int>();
    cfg.embed_dim = cj.at("embed_dim").get<int>();
    cfg.layers = cj.at("layers").get<int>();
    cfg.heads = cj.at("heads").get<int>();
    cfg.head_hidden = cj.at("head_hidden").get<int>();
    cfg.ffn_hidden = cj.at("ffn_hidden").get<int>();
    cfg.dropout_p = cj.at("dropout_p").get<double>();
    cfg.classes = cj.at("classes").get<int>();
    *this = NeuralNet(cfg);
    token_embed_ = mat_from(j.at("token_embed"));
    pos_embed_ = mat_from(j.at("pos_embed"));
    for (int li = 0; li < cfg.layers; ++li) {
        const auto& lj = j.at("layers").at(li);
        Layer& l = layers_[li];
        l.wq = mat_from(lj.at("wq"));
        l.wk = mat_from(lj.at("wk"));
        l.wv = mat_from(lj.at("wv"));
        l.wo = mat_from(lj.at("wo"));
        l.bq = vec_from(lj.at("bq"));
        l.bk = vec_from(lj.at("bk"));
        l.bv = vec_from(lj.at("bv"));
        l.bo = vec_from(lj.at("bo"));
        l.ln1_g = vec_from(lj.at("ln1_g"));
        l.ln1_b = vec_from(lj.at("ln1_b"));
        l.ln2_g = vec_from(lj.at("ln2_g"));
        l.ln2_b = vec_from(lj.at("ln2_b"));
        l.ff1 = mat_from(lj.at("ff1"));
        l.ff1_b = vec_from(lj.at("ff1_b"));
        l.ff2 = mat_from(lj.at("ff2"));
        l.ff2_b = vec_from(lj.at("ff2_b"));
    }
    head_w1_ = mat_from(j.at("head_w1"));
    head_b1_ = vec_from(j.at("head_b1"));
    head_w2_ = mat_from(j.at("head_w2"));
    head_b2_ = vec_from(j.at("head_b2"));
}

// ---- model wrapper ----------------------------------------------------------

std::vector<double> NeuralModel::score(const std::vector<double>&) const {
    throw UsageError("a NeuralHead model classifies source text, not "
                     "feature vectors; use score_source");
}

std::vector<double> NeuralModel::score_source(const std::string& source) const {
    std::vector<int> ids = vocab_.encode(source, net_.config().max_tokens);
    return net_.probabilities(ids);
}

nlohmann::json NeuralModel::payload_to_json() const {
    return {{"net", net_.params_to_json()}, {"vocab", vocab_.to_json()}};
}

std::unique_ptr<NeuralModel> NeuralModel::from_payload(const nlohmann::json& j) {
    auto model = std::make_unique<NeuralModel>();
    model->net_.params_from_json(j.at("net"));
    model->vocab_ = TokenizerVocab::from_json(j.at("vocab"));
    return model;
}

}  // namespace styloc
