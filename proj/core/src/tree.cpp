#include "lorasf/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lorasf/rng.hpp"

namespace lorasf {

namespace {

struct ValueLabel {
    double value;
    std::int32_t cls;  // class index, not label
};

struct NodeTask {
    std::int32_t node_id;
    std::uint32_t lo;
    std::uint32_t hi;  // sample index range [lo, hi)
};

class CartBuilder {
public:
    CartBuilder(const Dataset& ds, const std::vector<int>& classes,
                std::span<const std::uint32_t> sample_indices, const CartParams& params)
        : ds_(ds), classes_(classes), params_(params) {
        n_classes_ = static_cast<int>(classes_.size());
        p_ = static_cast<int>(ds.cols());
        mtry_ = params.features_per_split > 0 ? std::min(params.features_per_split, p_) : p_;
        idx_.assign(sample_indices.begin(), sample_indices.end());
        scratch_.resize(idx_.size());
        cls_of_row_.resize(ds.rows());
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            cls_of_row_[i] = class_index(ds.label(i));
        }
        feature_order_.resize(static_cast<std::size_t>(p_));
    }

    DecisionTree build() {
        DecisionTree tree;
        tree.nodes.emplace_back();
        std::vector<NodeTask> stack;
        stack.push_back({0, 0, static_cast<std::uint32_t>(idx_.size())});

        while (!stack.empty()) {
            const NodeTask task = stack.back();
            stack.pop_back();
            process_node(tree, task, stack);
        }
        return tree;
    }

private:
    std::int32_t class_index(int label) const {
        auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
        if (it == classes_.end() || *it != label) {
            throw std::logic_error("label not in tree class list");
        }
        return static_cast<std::int32_t>(it - classes_.begin());
    }

    void make_leaf(TreeNode& node, std::span<const std::int64_t> counts) const {
        node.feature = -1;
        node.class_counts.assign(counts.begin(), counts.end());
        std::size_t best = 0;
        for (std::size_t c = 1; c < counts.size(); ++c) {
            if (counts[c] > counts[best]) best = c;  // strictly greater: tie -> lowest class
        }
        node.prediction = classes_[best];
    }

    void process_node(DecisionTree& tree, const NodeTask& task, std::vector<NodeTask>& stack) {
        const std::uint32_t lo = task.lo;
        const std::uint32_t hi = task.hi;
        const auto n = static_cast<std::int64_t>(hi - lo);

        std::vector<std::int64_t> counts(static_cast<std::size_t>(n_classes_), 0);
        for (std::uint32_t i = lo; i < hi; ++i) {
            ++counts[static_cast<std::size_t>(cls_of_row_[idx_[i]])];
        }
        std::int64_t parent_sumsq = 0;
        int present = 0;
        for (std::int64_t c : counts) {
            parent_sumsq += c * c;
            if (c > 0) ++present;
        }

        TreeNode& node = tree.nodes[static_cast<std::size_t>(task.node_id)];
        if (present <= 1) {
            make_leaf(node, counts);
            return;
        }

        // Candidate feature order comes from this node's own stream.
        Rng rng(derive_seed(params_.seed,
                            {seed_stream::kNode, params_.tree_index,
                             static_cast<std::uint64_t>(task.node_id)}));
        for (int f = 0; f < p_; ++f) feature_order_[static_cast<std::size_t>(f)] = f;
        for (int i = 0; i < mtry_; ++i) {
            const auto j = i + static_cast<int>(rng.next_index(static_cast<std::uint64_t>(p_ - i)));
            std::swap(feature_order_[static_cast<std::size_t>(i)],
                      feature_order_[static_cast<std::size_t>(j)]);
        }

        // Maximizing sumsqL/nL + sumsqR/nR maximizes the Gini decrease; the
        // two only differ by node-constant terms.
        double best_score = -1.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::int64_t best_left_n = 0;

        std::vector<std::int64_t> left_counts(static_cast<std::size_t>(n_classes_));
        const std::size_t cols = ds_.cols();
        const double* data = ds_.values().data();

        for (int fi = 0; fi < mtry_; ++fi) {
            const int f = feature_order_[static_cast<std::size_t>(fi)];
            ValueLabel* vl = scratch_.data() + lo;
            for (std::uint32_t i = lo; i < hi; ++i) {
                const std::uint32_t row = idx_[i];
                vl[i - lo] = {data[row * cols + static_cast<std::size_t>(f)], cls_of_row_[row]};
            }
            std::sort(vl, vl + n,
                      [](const ValueLabel& a, const ValueLabel& b) { return a.value < b.value; });
            if (vl[0].value == vl[n - 1].value) continue;  // constant within node

            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::int64_t left_sumsq = 0;
            std::int64_t right_sumsq = parent_sumsq;
            std::int64_t nl = 0;
            for (std::int64_t i = 0; i < n - 1; ++i) {
                const auto c = static_cast<std::size_t>(vl[i].cls);
                // Move one sample left; sum-of-squares updates are exact in
                // int64.
                left_sumsq += 2 * left_counts[c] + 1;
                right_sumsq -= 2 * (counts[c] - left_counts[c]) - 1;
                ++left_counts[c];
                ++nl;
                if (vl[i].value == vl[i + 1].value) continue;  // not a distinct-value boundary
                const double score = static_cast<double>(left_sumsq) / static_cast<double>(nl) +
                                     static_cast<double>(right_sumsq) / static_cast<double>(n - nl);
                if (score > best_score) {
                    double thr = vl[i].value + 0.5 * (vl[i + 1].value - vl[i].value);
                    // For adjacent doubles the midpoint can round up to the
                    // right value; clamp so "<= threshold" keeps exactly the
                    // left group.
                    if (!(thr < vl[i + 1].value)) thr = vl[i].value;
                    best_score = score;
                    best_feature = f;
                    best_threshold = thr;
                    best_left_n = nl;
                }
            }
        }

        // Zero-gain splits are accepted while the node is impure (XOR-like
        // data has only zero-gain candidates at the root); a node becomes a
        // leaf only when pure or when no candidate feature varies within it.
        if (best_feature < 0) {
            make_leaf(node, counts);
            return;
        }

        const auto pivot = std::partition(
            idx_.begin() + lo, idx_.begin() + hi, [&](std::uint32_t row) {
                return data[row * cols + static_cast<std::size_t>(best_feature)] <= best_threshold;
            });
        const auto mid = static_cast<std::uint32_t>(pivot - idx_.begin());
        if (mid == lo || mid == hi || static_cast<std::int64_t>(mid - lo) != best_left_n) {
            throw std::logic_error("cart partition does not match scan");
        }

        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        const auto right_id = left_id + 1;
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left_id;
        node.right = right_id;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        // Ids are assigned at creation and the stack is processed LIFO with
        // the left child first, so numbering is a fixed function of the data.
        stack.push_back({right_id, mid, hi});
        stack.push_back({left_id, lo, mid});
    }

    const Dataset& ds_;
    const std::vector<int>& classes_;
    CartParams params_;
    int n_classes_ = 0;
    int p_ = 0;
    int mtry_ = 0;
    std::vector<std::uint32_t> idx_;
    std::vector<ValueLabel> scratch_;
    std::vector<std::int32_t> cls_of_row_;
    std::vector<int> feature_order_;
};

}  // namespace

int DecisionTree::predict(std::span<const double> x) const {
    return leaf_for(x).prediction;
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) {
        node = x[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &nodes[static_cast<std::size_t>(node->left)]
                   : &nodes[static_cast<std::size_t>(node->right)];
    }
    return *node;
}

DecisionTree grow_cart(const Dataset& ds, const std::vector<int>& classes,
                       std::span<const std::uint32_t> sample_indices, const CartParams& params) {
    if (sample_indices.empty()) throw std::invalid_argument("cart: no training samples");
    if (classes.empty()) throw std::invalid_argument("cart: empty class list");
    CartBuilder builder(ds, classes, sample_indices, params);
    return builder.build();
}

}  // namespace lorasf
