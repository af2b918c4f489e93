#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "styloc/matrix.hpp"
#include "styloc/rng.hpp"

namespace styloc {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_class = -1;            // classification leaf
    double value = 0.0;             // regression leaf
    std::vector<double> fractions;  // classification leaf: class shares
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    int leaf_for(const double* x) const {
        int cur = 0;
        while (nodes[cur].feature >= 0) {
            cur = x[nodes[cur].feature] <= nodes[cur].threshold
                      ? nodes[cur].left
                      : nodes[cur].right;
        }
        return cur;
    }
    int max_depth() const;
};

struct TreeConfig {
    int max_depth = 8;       // number of split levels; 0 grows a bare leaf
    int mtry = 0;            // candidate features per split; 0 = all
    bool classification = true;
};

// Sample order per feature, ascending by value; computed once per training
// matrix and shared by every tree grown on it.
using SortedOrder = std::vector<std::vector<std::int32_t>>;
SortedOrder presort(const LabeledMatrix& m);

// CART growth, level-synchronous over the pre-sorted columns. Splits use
// midpoint thresholds between consecutive distinct values; a split must
// strictly reduce weighted Gini (or SSE for regression), ties resolved to
// the lowest feature index then lowest threshold. `weights` carries
// bootstrap multiplicities (zero = out of bag). For regression, `targets`
// supplies the values and labels are ignored. When `leaf_of` is non-null it
// receives the final leaf id per in-bag sample (-1 otherwise).
DecisionTree grow_tree(const LabeledMatrix& m, const SortedOrder& order,
                       const std::vector<double>& weights,
                       const std::vector<double>& targets,
                       const TreeConfig& config, Rng* feature_rng,
                       std::vector<std::int32_t>* leaf_of = nullptr);

nlohmann::json tree_to_json(const DecisionTree& t);
DecisionTree tree_from_json(const nlohmann::json& j);

}  // namespace styloc
