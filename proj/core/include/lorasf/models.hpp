#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lorasf/dataset.hpp"
#include "lorasf/tree.hpp"

namespace lorasf {

enum class ModelKind : int { Knn = 0, Dtc = 1, Mlr = 2, Rf = 3 };

inline constexpr std::array<ModelKind, 4> kAllModelKinds = {
    ModelKind::Knn, ModelKind::Dtc, ModelKind::Mlr, ModelKind::Rf,
};

const std::string& model_kind_name(ModelKind kind);  // "k-NN", "DTC", "MLR", "RF"
ModelKind parse_model_kind(const std::string& name); // case-insensitive

enum class KnnKSelection {
    EvaluationSet,    // scan k against the provided evaluation set
    ValidationSplit,  // scan k against a secondary split of the training set
};

struct Hyperparams {
    int knn_k_min = 1;
    int knn_k_max = 20;
    KnnKSelection knn_k_selection = KnnKSelection::EvaluationSet;
    double knn_validation_fraction = 0.8;
    std::size_t knn_max_train_rows = 0;  // 0 = keep all; otherwise subsample cap
    std::uint64_t knn_subsample_seed = 42;

    std::uint64_t dtc_seed = 42;

    int mlr_max_iter = 1000;
    double mlr_l2_strength = 1.0;
    double mlr_tol = 1e-4;

    int rf_n_estimators = 100;
    bool rf_bootstrap = true;
    std::uint64_t rf_seed = 42;
    int rf_features_per_split = 0;  // 0 = ceil(sqrt(p))

    bool standardize = false;  // z-score k-NN/MLR inputs, fit on train only

    void validate() const;
    std::string to_json() const;
    static Hyperparams from_json(const std::string& text);
};

/// Per-feature z-scoring fitted on training data (population moments).
/// Zero-variance features keep scale 1 so they pass through centered.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Dataset& ds);
    void apply(std::span<double> row) const;
    std::vector<double> transform(std::span<const double> row) const;
};

struct KnnPayload {
    int k = 1;
    std::size_t rows = 0;
    std::vector<double> points;  // row-major rows x p, post-standardization
    std::vector<int> labels;
    std::vector<double> f1_per_k;  // weighted F1 for k_min..k_max (k scan)
};

struct ForestPayload {
    std::vector<DecisionTree> trees;
};

struct MlrPayload {
    std::vector<double> weights;  // row-major C x p
    std::vector<double> bias;     // C
    bool converged = false;
    int iterations = 0;
    double final_grad_norm = 0.0;
};

class TrainedModel {
public:
    ModelKind kind{};
    std::size_t feature_count = 0;
    std::vector<int> classes;  // ascending SF values present in training data
    std::optional<Standardizer> standardizer;
    Hyperparams hyperparams;
    std::variant<KnnPayload, ForestPayload, MlrPayload> payload;

    int predict(std::span<const double> x) const;
    std::vector<int> predict(const Dataset& ds) const;

    /// Stable softmax class probabilities (MLR only).
    std::vector<double> mlr_probabilities(std::span<const double> x) const;

    const KnnPayload& knn() const { return std::get<KnnPayload>(payload); }
    const ForestPayload& forest() const { return std::get<ForestPayload>(payload); }
    const MlrPayload& mlr() const { return std::get<MlrPayload>(payload); }

    /// Versioned JSON document; float fields round-trip bit-exactly.
    std::string to_json() const;
    static TrainedModel from_json(const std::string& text);
};

/// Common entry point; dispatches on kind. eval_for_k is required for k-NN
/// in EvaluationSet mode and ignored otherwise.
TrainedModel train(ModelKind kind, const Dataset& train, const Hyperparams& hp,
                   const Dataset* eval_for_k = nullptr);

TrainedModel knn_train(const Dataset& train, const Hyperparams& hp, const Dataset* eval_for_k);
TrainedModel dtc_train(const Dataset& train, std::uint64_t seed);
TrainedModel rf_train(const Dataset& train, const Hyperparams& hp);
TrainedModel mlr_train(const Dataset& train, const Hyperparams& hp);

struct KnnKScan {
    int best_k = 1;
    int k_min = 1;
    std::vector<double> weighted_f1_per_k;  // index 0 corresponds to k_min
};

/// Scans k over [k_min, k_max] (clamped to the training size), scoring each
/// k by weighted F1 on eval. Ties go to the smaller k.
KnnKScan knn_select_best_k(const Dataset& train, const Dataset& eval, int k_min, int k_max,
                           bool standardize);

/// Multinomial softmax cross-entropy with an L2 penalty on the weights
/// (bias unpenalized): mean CE + (l2/(2n))*||W||^2. Parameter layout is W
/// row-major (C x p) followed by b (C). Exposed so optimization tests can
/// evaluate the objective directly.
class MlrObjective {
public:
    MlrObjective(const Dataset& ds, std::vector<int> classes, double l2_strength);

    double operator()(std::span<const double> params, std::span<double> grad) const;
    std::size_t param_count() const { return classes_.size() * (p_ + 1); }
    const std::vector<int>& classes() const { return classes_; }

private:
    const Dataset& ds_;
    std::vector<int> classes_;
    std::vector<std::int32_t> row_class_;
    std::size_t p_;
    double l2_;
};

}  // namespace lorasf
