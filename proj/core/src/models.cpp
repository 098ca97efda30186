#include "lorasf/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "lorasf/rng.hpp"
#include "model_internal.hpp"

namespace lorasf {

namespace {

const std::array<std::string, 4> kKindNames = {"k-NN", "DTC", "MLR", "RF"};

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<int> distinct_sorted_labels(const std::vector<int>& labels) {
    std::vector<int> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

int effective_mtry(const Hyperparams& hp, std::size_t p) {
    if (hp.rf_features_per_split > 0) return hp.rf_features_per_split;
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));
}

}  // namespace

void require_trainable(const Dataset& train) {
    if (train.empty()) throw std::invalid_argument("training set is empty");
    for (double v : train.values()) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("training data contains non-finite values; run clean first");
        }
    }
    std::vector<int> classes = train.labels();
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) {
        throw std::invalid_argument("training data has a single class; nothing to learn");
    }
}

const std::string& model_kind_name(ModelKind kind) {
    return kKindNames.at(static_cast<std::size_t>(kind));
}

ModelKind parse_model_kind(const std::string& name) {
    const std::string key = to_lower(name);
    if (key == "knn" || key == "k-nn") return ModelKind::Knn;
    if (key == "dtc" || key == "tree") return ModelKind::Dtc;
    if (key == "mlr") return ModelKind::Mlr;
    if (key == "rf") return ModelKind::Rf;
    throw std::invalid_argument("unknown model kind: " + name);
}

void Hyperparams::validate() const {
    if (knn_k_min < 1 || knn_k_max < knn_k_min) {
        throw std::invalid_argument("hyperparams: k range must be non-empty and positive");
    }
    if (!(knn_validation_fraction > 0.0) || !(knn_validation_fraction < 1.0)) {
        throw std::invalid_argument("hyperparams: knn validation fraction must lie in (0,1)");
    }
    if (mlr_max_iter < 1) throw std::invalid_argument("hyperparams: mlr_max_iter must be >= 1");
    if (mlr_l2_strength < 0.0) throw std::invalid_argument("hyperparams: mlr L2 strength must be >= 0");
    if (!(mlr_tol > 0.0)) throw std::invalid_argument("hyperparams: mlr tolerance must be > 0");
    if (rf_n_estimators < 1) throw std::invalid_argument("hyperparams: rf_n_estimators must be >= 1");
    if (rf_features_per_split < 0) {
        throw std::invalid_argument("hyperparams: rf_features_per_split must be >= 0");
    }
}

std::string Hyperparams::to_json() const {
    nlohmann::json j = {
        {"knn_k_min", knn_k_min},
        {"knn_k_max", knn_k_max},
        {"knn_k_selection",
         knn_k_selection == KnnKSelection::EvaluationSet ? "evaluation_set" : "validation_split"},
        {"knn_validation_fraction", knn_validation_fraction},
        {"knn_max_train_rows", knn_max_train_rows},
        {"knn_subsample_seed", knn_subsample_seed},
        {"dtc_seed", dtc_seed},
        {"mlr_max_iter", mlr_max_iter},
        {"mlr_l2_strength", mlr_l2_strength},
        {"mlr_tol", mlr_tol},
        {"rf_n_estimators", rf_n_estimators},
        {"rf_bootstrap", rf_bootstrap},
        {"rf_seed", rf_seed},
        {"rf_features_per_split", rf_features_per_split},
        {"standardize", standardize},
    };
    return j.dump();
}

Hyperparams Hyperparams::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Hyperparams hp;
    auto get = [&](const char* key, auto& out) {
        if (auto it = j.find(key); it != j.end()) out = it->get<std::decay_t<decltype(out)>>();
    };
    get("knn_k_min", hp.knn_k_min);
    get("knn_k_max", hp.knn_k_max);
    if (auto it = j.find("knn_k_selection"); it != j.end()) {
        const std::string mode = it->get<std::string>();
        if (mode == "evaluation_set") hp.knn_k_selection = KnnKSelection::EvaluationSet;
        else if (mode == "validation_split") hp.knn_k_selection = KnnKSelection::ValidationSplit;
        else throw std::invalid_argument("unknown knn_k_selection: " + mode);
    }
    get("knn_validation_fraction", hp.knn_validation_fraction);
    get("knn_max_train_rows", hp.knn_max_train_rows);
    get("knn_subsample_seed", hp.knn_subsample_seed);
    get("dtc_seed", hp.dtc_seed);
    get("mlr_max_iter", hp.mlr_max_iter);
    get("mlr_l2_strength", hp.mlr_l2_strength);
    get("mlr_tol", hp.mlr_tol);
    get("rf_n_estimators", hp.rf_n_estimators);
    get("rf_bootstrap", hp.rf_bootstrap);
    get("rf_seed", hp.rf_seed);
    get("rf_features_per_split", hp.rf_features_per_split);
    get("standardize", hp.standardize);
    hp.validate();
    return hp;
}

Standardizer Standardizer::fit(const Dataset& ds) {
    const std::size_t p = ds.cols();
    Standardizer st;
    st.mean.assign(p, 0.0);
    st.scale.assign(p, 1.0);
    const auto n = static_cast<double>(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        auto row = ds.row(i);
        for (std::size_t j = 0; j < p; ++j) st.mean[j] += row[j];
    }
    for (double& m : st.mean) m /= n;
    std::vector<double> var(p, 0.0);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        auto row = ds.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = row[j] - st.mean[j];
            var[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        const double sd = std::sqrt(var[j] / n);
        st.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return st;
}

void Standardizer::apply(std::span<double> row) const {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) / scale[j];
}

std::vector<double> Standardizer::transform(std::span<const double> row) const {
    std::vector<double> out(row.begin(), row.end());
    apply(out);
    return out;
}

TrainedModel dtc_train(const Dataset& train, std::uint64_t seed) {
    require_trainable(train);
    TrainedModel model;
    model.kind = ModelKind::Dtc;
    model.feature_count = train.cols();
    model.classes = distinct_sorted_labels(train.labels());
    model.hyperparams.dtc_seed = seed;

    std::vector<std::uint32_t> all(train.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);

    CartParams params;
    params.seed = seed;
    params.tree_index = 0;
    params.features_per_split = 0;  // all features
    ForestPayload payload;
    payload.trees.push_back(grow_cart(train, model.classes, all, params));
    model.payload = std::move(payload);
    return model;
}

TrainedModel rf_train(const Dataset& train, const Hyperparams& hp) {
    require_trainable(train);
    hp.validate();

    TrainedModel model;
    model.kind = ModelKind::Rf;
    model.feature_count = train.cols();
    model.classes = distinct_sorted_labels(train.labels());
    model.hyperparams = hp;

    const std::size_t n = train.rows();
    std::vector<std::uint32_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);

    ForestPayload payload;
    payload.trees.reserve(static_cast<std::size_t>(hp.rf_n_estimators));
    for (int t = 0; t < hp.rf_n_estimators; ++t) {
        std::vector<std::uint32_t> sample;
        if (hp.rf_bootstrap) {
            Rng rng(derive_seed(hp.rf_seed,
                                {seed_stream::kBootstrap, static_cast<std::uint64_t>(t)}));
            sample.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                sample[i] = static_cast<std::uint32_t>(rng.next_index(n));
            }
        }
        CartParams params;
        params.seed = hp.rf_seed;
        params.tree_index = static_cast<std::uint32_t>(t);
        params.features_per_split = effective_mtry(hp, train.cols());
        payload.trees.push_back(
            grow_cart(train, model.classes, hp.rf_bootstrap ? sample : all, params));
    }
    model.payload = std::move(payload);
    return model;
}

int forest_predict_one(const TrainedModel& model, std::span<const double> x) {
    const ForestPayload& payload = model.forest();
    std::array<int, 16> votes{};
    for (const DecisionTree& tree : payload.trees) {
        const int label = tree.predict(x);
        const auto it = std::lower_bound(model.classes.begin(), model.classes.end(), label);
        ++votes[static_cast<std::size_t>(it - model.classes.begin())];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < model.classes.size(); ++c) {
        if (votes[c] > votes[best]) best = c;  // tie -> lowest SF
    }
    return model.classes[best];
}

TrainedModel train(ModelKind kind, const Dataset& train_ds, const Hyperparams& hp,
                   const Dataset* eval_for_k) {
    hp.validate();
    require_trainable(train_ds);
    switch (kind) {
        case ModelKind::Knn: return knn_train(train_ds, hp, eval_for_k);
        case ModelKind::Dtc: return dtc_train(train_ds, hp.dtc_seed);
        case ModelKind::Mlr: return mlr_train(train_ds, hp);
        case ModelKind::Rf: return rf_train(train_ds, hp);
    }
    throw std::logic_error("unknown model kind");
}

int TrainedModel::predict(std::span<const double> x) const {
    if (x.size() != feature_count) {
        throw std::invalid_argument("predict: feature vector has wrong dimension");
    }
    switch (kind) {
        case ModelKind::Knn: return knn_predict_one(*this, x);
        case ModelKind::Dtc:
        case ModelKind::Rf: return forest_predict_one(*this, x);
        case ModelKind::Mlr: return mlr_predict_one(*this, x);
    }
    throw std::logic_error("unknown model kind");
}

std::vector<int> TrainedModel::predict(const Dataset& ds) const {
    if (ds.cols() != feature_count) {
        throw std::invalid_argument("predict: dataset column count does not match model");
    }
    std::vector<int> out;
    out.reserve(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) out.push_back(predict(ds.row(i)));
    return out;
}

namespace {

nlohmann::json tree_to_json(const DecisionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
        nlohmann::json jn = {
            {"feature", n.feature},
            {"threshold", n.threshold},
            {"left", n.left},
            {"right", n.right},
            {"prediction", n.prediction},
        };
        if (n.is_leaf()) jn["class_counts"] = n.class_counts;
        nodes.push_back(std::move(jn));
    }
    return nlohmann::json{{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree tree;
    for (const nlohmann::json& jn : j.at("nodes")) {
        TreeNode n;
        n.feature = jn.at("feature").get<std::int32_t>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<std::int32_t>();
        n.right = jn.at("right").get<std::int32_t>();
        n.prediction = jn.at("prediction").get<int>();
        if (auto it = jn.find("class_counts"); it != jn.end()) {
            n.class_counts = it->get<std::vector<std::int64_t>>();
        }
        tree.nodes.push_back(std::move(n));
    }
    if (tree.nodes.empty()) throw std::invalid_argument("model json: tree without nodes");
    return tree;
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string("model json: non-finite value in ") + what);
        }
    }
}

}  // namespace

std::string TrainedModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = model_kind_name(kind);
    j["feature_count"] = feature_count;
    j["classes"] = classes;
    j["hyperparams"] = nlohmann::json::parse(hyperparams.to_json());
    if (standardizer) {
        require_finite(standardizer->mean, "standardizer mean");
        j["standardizer"] = {{"mean", standardizer->mean}, {"scale", standardizer->scale}};
    } else {
        j["standardizer"] = nullptr;
    }

    if (kind == ModelKind::Knn) {
        const KnnPayload& p = knn();
        require_finite(p.points, "knn points");
        j["payload"] = {
            {"k", p.k},
            {"rows", p.rows},
            {"points", p.points},
            {"labels", p.labels},
            {"f1_per_k", p.f1_per_k},
        };
    } else if (kind == ModelKind::Mlr) {
        const MlrPayload& p = mlr();
        require_finite(p.weights, "mlr weights");
        require_finite(p.bias, "mlr bias");
        j["payload"] = {
            {"weights", p.weights},
            {"bias", p.bias},
            {"converged", p.converged},
            {"iterations", p.iterations},
            {"final_grad_norm", p.final_grad_norm},
        };
    } else {
        nlohmann::json trees = nlohmann::json::array();
        for (const DecisionTree& t : forest().trees) trees.push_back(tree_to_json(t));
        j["payload"] = {{"trees", std::move(trees)}};
    }
    return j.dump();
}

TrainedModel TrainedModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format_version").get<int>() != 1) {
        throw std::invalid_argument("model json: unsupported format version");
    }

    TrainedModel model;
    model.kind = parse_model_kind(j.at("kind").get<std::string>());
    model.feature_count = j.at("feature_count").get<std::size_t>();
    model.classes = j.at("classes").get<std::vector<int>>();
    model.hyperparams = Hyperparams::from_json(j.at("hyperparams").dump());
    if (!j.at("standardizer").is_null()) {
        Standardizer st;
        st.mean = j["standardizer"].at("mean").get<std::vector<double>>();
        st.scale = j["standardizer"].at("scale").get<std::vector<double>>();
        if (st.mean.size() != model.feature_count || st.scale.size() != model.feature_count) {
            throw std::invalid_argument("model json: standardizer dimension mismatch");
        }
        model.standardizer = std::move(st);
    }

    const nlohmann::json& p = j.at("payload");
    if (model.kind == ModelKind::Knn) {
        KnnPayload payload;
        payload.k = p.at("k").get<int>();
        payload.rows = p.at("rows").get<std::size_t>();
        payload.points = p.at("points").get<std::vector<double>>();
        payload.labels = p.at("labels").get<std::vector<int>>();
        payload.f1_per_k = p.at("f1_per_k").get<std::vector<double>>();
        if (payload.points.size() != payload.rows * model.feature_count ||
            payload.labels.size() != payload.rows) {
            throw std::invalid_argument("model json: knn payload dimension mismatch");
        }
        model.payload = std::move(payload);
    } else if (model.kind == ModelKind::Mlr) {
        MlrPayload payload;
        payload.weights = p.at("weights").get<std::vector<double>>();
        payload.bias = p.at("bias").get<std::vector<double>>();
        payload.converged = p.at("converged").get<bool>();
        payload.iterations = p.at("iterations").get<int>();
        payload.final_grad_norm = p.at("final_grad_norm").get<double>();
        if (payload.weights.size() != model.classes.size() * model.feature_count ||
            payload.bias.size() != model.classes.size()) {
            throw std::invalid_argument("model json: mlr payload dimension mismatch");
        }
        model.payload = std::move(payload);
    } else {
        ForestPayload payload;
        for (const nlohmann::json& jt : p.at("trees")) payload.trees.push_back(tree_from_json(jt));
        if (payload.trees.empty()) throw std::invalid_argument("model json: empty forest");
        model.payload = std::move(payload);
    }
    return model;
}

}  // namespace lorasf
