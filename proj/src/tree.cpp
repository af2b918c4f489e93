#include "styloc/tree.hpp"

#include <algorithm>
#include <cmath>

#include "styloc/ioutil.hpp"

namespace styloc {

namespace {
constexpr double kMinGain = 1e-12;
}

int DecisionTree::max_depth() const {
    std::vector<std::pair<int, int>> stack = {{0, 0}};
    int best = 0;
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        best = std::max(best, depth);
        if (nodes[id].feature >= 0) {
            stack.push_back({nodes[id].left, depth + 1});
            stack.push_back({nodes[id].right, depth + 1});
        }
    }
    return best;
}

SortedOrder presort(const LabeledMatrix& m) {
    SortedOrder order(m.n_cols);
    for (std::size_t f = 0; f < m.n_cols; ++f) {
        auto& idx = order[f];
        idx.resize(m.n_rows);
        for (std::size_t i = 0; i < m.n_rows; ++i) {
            idx[i] = static_cast<std::int32_t>(i);
        }
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::int32_t a, std::int32_t b) {
                             return m.at(a, f) < m.at(b, f);
                         });
    }
    return order;
}

namespace {

// Per-node scan state while sweeping one feature column.
struct ScanState {
    bool seen = false;
    double prev = 0.0;
    double w_left = 0.0;
    double sum_left = 0.0;              // regression
    std::vector<double> counts_left;    // classification
};

struct NodeAgg {
    double w = 0.0;
    double sum = 0.0;                 // regression target sum
    std::vector<double> counts;       // classification class weights
    int node_id = -1;
    int distinct_rows = 0;
    std::vector<std::uint64_t> feature_mask;  // empty = all features

    bool wants(std::size_t f) const {
        if (feature_mask.empty()) return true;
        return (feature_mask[f >> 6] >> (f & 63)) & 1ULL;
    }
};

struct BestSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

double gini_weighted(const std::vector<double>& counts, double w) {
    if (w <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return w - sq / w;
}

}  // namespace

DecisionTree grow_tree(const LabeledMatrix& m, const SortedOrder& order,
                       const std::vector<double>& weights,
                       const std::vector<double>& targets,
                       const TreeConfig& config, Rng* feature_rng,
                       std::vector<std::int32_t>* leaf_of) {
    const std::size_t n = m.n_rows;
    const std::size_t d = m.n_cols;
    const int k = static_cast<int>(m.n_classes());
    if (n == 0) throw DataError("grow_tree: empty training data");

    DecisionTree tree;
    tree.nodes.emplace_back();
    std::vector<std::int32_t> node_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] > 0.0) node_of[i] = 0;
    }
    std::vector<int> active = {0};

    auto finalize_leaf = [&](int id, const NodeAgg& agg) {
        TreeNode& node = tree.nodes[id];
        node.feature = -1;
        if (config.classification) {
            node.fractions.resize(k);
            int best_class = 0;
            for (int c = 0; c < k; ++c) {
                node.fractions[c] = agg.w > 0.0 ? agg.counts[c] / agg.w : 0.0;
                if (agg.counts[c] > agg.counts[best_class]) best_class = c;
            }
            node.leaf_class = best_class;
        } else {
            node.value = agg.w > 0.0 ? agg.sum / agg.w : 0.0;
        }
    };

    for (int depth = 0; !active.empty(); ++depth) {
        // aggregate statistics per active node
        std::vector<int> slot_of(tree.nodes.size(), -1);
        std::vector<NodeAgg> aggs(active.size());
        for (std::size_t s = 0; s < active.size(); ++s) {
            slot_of[active[s]] = static_cast<int>(s);
            aggs[s].node_id = active[s];
            if (config.classification) aggs[s].counts.assign(k, 0.0);
        }
        std::vector<std::int32_t> last_row(active.size(), -1);
        for (std::size_t i = 0; i < n; ++i) {
            if (node_of[i] < 0) continue;
            int s = slot_of[node_of[i]];
            if (s < 0) continue;
            NodeAgg& a = aggs[s];
            a.w += weights[i];
            if (config.classification) {
                a.counts[m.labels[i]] += weights[i];
            } else {
                a.sum += weights[i] * targets[i];
            }
            a.distinct_rows += 1;
            last_row[s] = static_cast<std::int32_t>(i);
        }

        // decide which nodes may split, draw feature subsets
        std::vector<bool> splittable(active.size(), false);
        bool any = false;
        for (std::size_t s = 0; s < active.size(); ++s) {
            NodeAgg& a = aggs[s];
            bool pure = false;
            if (config.classification) {
                for (int c = 0; c < k; ++c) {
                    if (a.counts[c] == a.w && a.w > 0.0) pure = true;
                }
            }
            if (depth >= config.max_depth || a.distinct_rows < 2 || pure) {
                continue;
            }
            splittable[s] = true;
            any = true;
            if (config.mtry > 0 && config.mtry < static_cast<int>(d) &&
                feature_rng != nullptr) {
                a.feature_mask.assign((d + 63) / 64, 0);
                std::vector<std::size_t> pool(d);
                for (std::size_t f = 0; f < d; ++f) pool[f] = f;
                for (int pick = 0; pick < config.mtry; ++pick) {
                    std::size_t j =
                        pick + feature_rng->below(d - pick);
                    std::swap(pool[pick], pool[j]);
                    std::size_t f = pool[pick];
                    a.feature_mask[f >> 6] |= 1ULL << (f & 63);
                }
            }
        }

        std::vector<BestSplit> best(active.size());
        if (any) {
            std::vector<ScanState> states(active.size());
            for (std::size_t f = 0; f < d; ++f) {
                bool wanted = false;
                for (std::size_t s = 0; s < active.size(); ++s) {
                    if (splittable[s] && aggs[s].wants(f)) {
                        states[s] = ScanState();
                        if (config.classification) {
                            states[s].counts_left.assign(k, 0.0);
                        }
                        wanted = true;
                    }
                }
                if (!wanted) continue;
                for (std::int32_t i : order[f]) {
                    if (node_of[i] < 0) continue;
                    int s = slot_of[node_of[i]];
                    if (s < 0 || !splittable[s] || !aggs[s].wants(f)) continue;
                    ScanState& st = states[s];
                    const NodeAgg& a = aggs[s];
                    double v = m.at(i, f);
                    if (st.seen && v > st.prev) {
                        double thr = st.prev + (v - st.prev) / 2.0;
                        if (thr < v && st.w_left > 0.0 &&
                            a.w - st.w_left > 0.0) {
                            double gain;
                            if (config.classification) {
                                std::vector<double> right(a.counts);
                                for (int c = 0; c < k; ++c) {
                                    right[c] -= st.counts_left[c];
                                }
                                gain = gini_weighted(a.counts, a.w) -
                                       gini_weighted(st.counts_left,
                                                     st.w_left) -
                                       gini_weighted(right, a.w - st.w_left);
                            } else {
                                double sr = a.sum - st.sum_left;
                                double wr = a.w - st.w_left;
                                gain = st.sum_left * st.sum_left / st.w_left +
                                       sr * sr / wr - a.sum * a.sum / a.w;
                            }
                            if (gain > best[s].gain + kMinGain ||
                                (best[s].feature < 0 && gain > kMinGain)) {
                                best[s].gain = gain;
                                best[s].feature = static_cast<int>(f);
                                best[s].threshold = thr;
                            }
                        }
                    }
                    st.w_left += weights[i];
                    if (config.classification) {
                        st.counts_left[m.labels[i]] += weights[i];
                    } else {
                        st.sum_left += weights[i] * targets[i];
                    }
                    st.prev = v;
                    st.seen = true;
                }
            }
        }

        // materialize splits / leaves, reassign samples
        std::vector<int> next_active;
        for (std::size_t s = 0; s < active.size(); ++s) {
            int id = active[s];
            if (best[s].feature >= 0) {
                int left = static_cast<int>(tree.nodes.size());
                tree.nodes.emplace_back();
                int right = static_cast<int>(tree.nodes.size());
                tree.nodes.emplace_back();
                TreeNode& node = tree.nodes[id];
                node.feature = best[s].feature;
                node.threshold = best[s].threshold;
                node.left = left;
                node.right = right;
                next_active.push_back(left);
                next_active.push_back(right);
            } else {
                finalize_leaf(id, aggs[s]);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (node_of[i] < 0) continue;
            const TreeNode& node = tree.nodes[node_of[i]];
            if (node.feature >= 0) {
                node_of[i] = m.at(i, node.feature) <= node.threshold
                                 ? node.left
                                 : node.right;
            }
        }
        active = std::move(next_active);
    }

    if (leaf_of != nullptr) *leaf_of = std::move(node_of);
    return tree;
}

nlohmann::json tree_to_json(const DecisionTree& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : t.nodes) {
        nlohmann::json j;
        j["f"] = n.feature;
        if (n.feature >= 0) {
            j["t"] = n.threshold;
            j["l"] = n.left;
            j["r"] = n.right;
        } else if (n.leaf_class >= 0) {
            j["c"] = n.leaf_class;
            j["p"] = n.fractions;
        } else {
            j["v"] = n.value;
        }
        nodes.push_back(std::move(j));
    }
    return nodes;
}

DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree t;
    for (const auto& nj : j) {
        TreeNode n;
        n.feature = nj.at("f").get<int>();
        if (n.feature >= 0) {
            n.threshold = nj.at("t").get<double>();
            n.left = nj.at("l").get<int>();
            n.right = nj.at("r").get<int>();
        } else if (nj.contains("c")) {
            n.leaf_class = nj.at("c").get<int>();
            n.fractions = nj.at("p").get<std::vector<double>>();
        } else {
            n.value = nj.at("v").get<double>();
        }
        t.nodes.push_back(std::move(n));
    }
    if (t.nodes.empty()) throw DataError("tree payload has no nodes");
    return t;
}

}  // namespace styloc
