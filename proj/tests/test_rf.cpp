#include <doctest.h>

#include <map>

#include "lorasf/models.hpp"
#include "lorasf/rng.hpp"
#include "lorasf/synthetic.hpp"

using namespace lorasf;

namespace {

Dataset random_dataset(std::size_t n, std::size_t p, std::uint64_t seed, int n_classes = 4) {
    Rng rng(seed);
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<std::string> names = {"RSSI", "SNR", "Frequency", "Height", "Distance"};
    names.resize(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) values.push_back(rng.next_normal());
        labels.push_back(7 + static_cast<int>(rng.next_index(static_cast<std::uint64_t>(n_classes))));
    }
    return Dataset(names, std::move(values), std::move(labels));
}

}  // namespace

TEST_CASE("default forest stores 100 trees") {
    Dataset train = random_dataset(120, 2, 1);
    Hyperparams hp;
    TrainedModel model = rf_train(train, hp);
    CHECK(model.forest().trees.size() == 100);
}

TEST_CASE("rf with 1 tree, no bootstrap, all features equals dtc") {
    SyntheticConfig cfg;
    cfg.n_rows = 800;
    cfg.seed = 60;
    Dataset train = generate_synthetic(cfg);

    Hyperparams hp;
    hp.rf_n_estimators = 1;
    hp.rf_bootstrap = false;
    hp.rf_features_per_split = 5;
    hp.rf_seed = 42;
    TrainedModel rf = rf_train(train, hp);
    TrainedModel dtc = dtc_train(train, 42);

    // Prediction-by-prediction equality over a grid of held-out points.
    SyntheticConfig grid_cfg = cfg;
    grid_cfg.seed = 61;
    grid_cfg.n_rows = 200;
    Dataset grid = generate_synthetic(grid_cfg);
    CHECK(rf.predict(grid) == dtc.predict(grid));
    CHECK(rf.predict(train) == dtc.predict(train));
}

TEST_CASE("tie between two trees resolves to the lowest SF") {
    // Hand-assembled forest: two single-leaf trees voting SF9 and SF7.
    TrainedModel model;
    model.kind = ModelKind::Rf;
    model.feature_count = 1;
    model.classes = {7, 9};

    DecisionTree vote9;
    vote9.nodes.push_back(TreeNode{-1, 0.0, -1, -1, 9, {0, 1}});
    DecisionTree vote7;
    vote7.nodes.push_back(TreeNode{-1, 0.0, -1, -1, 7, {1, 0}});
    model.payload = ForestPayload{{vote9, vote7}};

    CHECK(model.predict(std::vector<double>{0.5}) == 7);
}

TEST_CASE("forest prediction equals the majority vote of per-tree queries") {
    Dataset train = random_dataset(300, 3, 7);
    Hyperparams hp;
    hp.rf_n_estimators = 15;
    TrainedModel model = rf_train(train, hp);

    Dataset probe = random_dataset(50, 3, 8);
    const std::vector<int> preds = model.predict(probe);
    for (std::size_t i = 0; i < probe.rows(); ++i) {
        std::map<int, int> votes;
        for (const DecisionTree& tree : model.forest().trees) ++votes[tree.predict(probe.row(i))];
        int best_label = 0;
        int best_count = -1;
        for (const auto& [label, count] : votes) {  // map order: lowest label first on ties
            if (count > best_count) {
                best_count = count;
                best_label = label;
            }
        }
        CHECK(preds[i] == best_label);
    }
}

TEST_CASE("bootstrap off uses every row once: tree fits training data exactly") {
    Dataset train = random_dataset(100, 2, 3);
    Hyperparams hp;
    hp.rf_n_estimators = 1;
    hp.rf_bootstrap = false;
    hp.rf_features_per_split = 2;
    TrainedModel model = rf_train(train, hp);
    CHECK(model.predict(train) == train.labels());
}

TEST_CASE("same seed reproduces the forest, different seeds differ") {
    Dataset train = random_dataset(200, 2, 12);
    Hyperparams hp;
    hp.rf_n_estimators = 5;
    hp.rf_seed = 1000;
    TrainedModel a = rf_train(train, hp);
    TrainedModel b = rf_train(train, hp);
    REQUIRE(a.forest().trees.size() == b.forest().trees.size());
    for (std::size_t t = 0; t < a.forest().trees.size(); ++t) {
        CHECK(a.forest().trees[t].nodes.size() == b.forest().trees[t].nodes.size());
    }
    Dataset probe = random_dataset(100, 2, 13);
    CHECK(a.predict(probe) == b.predict(probe));

    hp.rf_seed = 1001;
    TrainedModel c = rf_train(train, hp);
    bool any_different = false;
    for (std::size_t i = 0; i < probe.rows() && !any_different; ++i) {
        any_different = a.predict(probe.row(i)) != c.predict(probe.row(i));
    }
    // Different bootstrap draws virtually always change some prediction on
    // pure-noise data.
    CHECK(any_different);
}

TEST_CASE("trees differ across the forest when bootstrapping") {
    Dataset train = random_dataset(150, 2, 9);
    Hyperparams hp;
    hp.rf_n_estimators = 4;
    TrainedModel model = rf_train(train, hp);
    const auto& trees = model.forest().trees;
    bool any_structural_difference = false;
    for (std::size_t t = 1; t < trees.size() && !any_structural_difference; ++t) {
        any_structural_difference = trees[t].nodes.size() != trees[0].nodes.size() ||
                                    trees[t].nodes[0].threshold != trees[0].nodes[0].threshold;
    }
    CHECK(any_structural_difference);
}

TEST_CASE("predicting an empty dataset yields an empty label vector") {
    Dataset train = random_dataset(50, 2, 77);
    Hyperparams hp;
    hp.rf_n_estimators = 2;
    TrainedModel model = rf_train(train, hp);
    Dataset empty({"RSSI", "SNR"}, {}, {});
    CHECK(model.predict(empty).empty());

    Dataset wrong_width({"RSSI"}, {1.0}, {7});
    CHECK_THROWS_AS(model.predict(wrong_width), std::invalid_argument);
}

TEST_CASE("duplicated test rows predict independently and identically") {
    Dataset train = random_dataset(120, 2, 31);
    Hyperparams hp;
    hp.rf_n_estimators = 9;
    TrainedModel model = rf_train(train, hp);

    std::vector<double> row = {0.25, -1.5};
    const int once = model.predict(row);
    std::vector<double> values;
    for (int i = 0; i < 5; ++i) values.insert(values.end(), row.begin(), row.end());
    Dataset repeated({"RSSI", "SNR"}, values, {7, 7, 7, 7, 7});
    for (int pred : model.predict(repeated)) CHECK(pred == once);
}
