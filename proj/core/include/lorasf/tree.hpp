#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lorasf/dataset.hpp"

namespace lorasf {

/// Seed-stream purposes. Every random decision is keyed by
/// derive_seed(seed, {purpose, ...ids}) so that work units are
/// order-independent and adding one never perturbs another.
namespace seed_stream {
inline constexpr std::uint64_t kNode = 1;
inline constexpr std::uint64_t kBootstrap = 2;
inline constexpr std::uint64_t kKnnSubsample = 3;
inline constexpr std::uint64_t kRun = 4;
}  // namespace seed_stream

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // x[feature] <= threshold routes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    int prediction = 0;                       // majority label, tie -> lowest
    std::vector<std::int64_t> class_counts;   // leaf only, indexed by model class list

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    int predict(std::span<const double> x) const;
    const TreeNode& leaf_for(std::span<const double> x) const;
};

struct CartParams {
    std::uint64_t seed = 42;
    std::uint32_t tree_index = 0;
    int features_per_split = 0;  // 0 => consider all features
};

/// Grows a CART to purity: at each node the (feature, threshold) pair with
/// the largest Gini impurity decrease wins, thresholds being midpoints
/// between consecutive distinct sorted values. Candidate features are
/// visited in an order drawn from the node's own seed stream
/// (seed, tree_index, node_index), which both breaks equal-gain ties
/// deterministically and implements the per-split feature subsampling used
/// by random forests. Nodes become leaves when pure or when no split has
/// positive gain.
DecisionTree grow_cart(const Dataset& ds, const std::vector<int>& classes,
                       std::span<const std::uint32_t> sample_indices, const CartParams& params);

}  // namespace lorasf
