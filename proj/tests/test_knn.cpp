#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "lorasf/metrics.hpp"
#include "lorasf/models.hpp"
#include "lorasf/rng.hpp"

using namespace lorasf;

namespace {

Dataset dataset_1d(const std::vector<std::pair<double, int>>& points) {
    std::vector<double> values;
    std::vector<int> labels;
    for (const auto& [x, y] : points) {
        values.push_back(x);
        labels.push_back(y);
    }
    return Dataset({"RSSI"}, std::move(values), std::move(labels));
}

Hyperparams knn_hp(int k) {
    Hyperparams hp;
    hp.knn_k_min = k;
    hp.knn_k_max = k;
    return hp;
}

// Independent naive k-NN: full distance table, stable sort by (distance,
// index), majority vote with lowest-label ties.
int naive_knn(const Dataset& train, std::span<const double> x, int k) {
    std::vector<std::pair<double, std::size_t>> dists;
    for (std::size_t r = 0; r < train.rows(); ++r) {
        double s = 0.0;
        auto row = train.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) s += (row[j] - x[j]) * (row[j] - x[j]);
        dists.emplace_back(s, r);
    }
    std::sort(dists.begin(), dists.end());
    std::map<int, int> votes;
    for (int i = 0; i < k; ++i) ++votes[train.label(dists[static_cast<std::size_t>(i)].second)];
    int best_label = 0;
    int best_count = -1;
    for (const auto& [label, count] : votes) {
        if (count > best_count) {
            best_count = count;
            best_label = label;
        }
    }
    return best_label;
}

}  // namespace

TEST_CASE("k=1 on a training point returns that point's label") {
    Dataset train = dataset_1d({{0, 7}, {1, 9}, {10, 12}});
    TrainedModel model = knn_train(train, knn_hp(1), &train);
    CHECK(model.knn().k == 1);
    CHECK(model.predict(std::vector<double>{0.0}) == 7);
    CHECK(model.predict(std::vector<double>{1.0}) == 9);
    CHECK(model.predict(std::vector<double>{10.0}) == 12);
}

TEST_CASE("1-NN training accuracy is 100% on distinct points") {
    Rng rng(21);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        values.push_back(rng.next_normal());
        values.push_back(rng.next_normal());
        labels.push_back(7 + static_cast<int>(rng.next_index(6)));
    }
    Dataset train({"RSSI", "SNR"}, values, labels);
    TrainedModel model = knn_train(train, knn_hp(1), &train);
    CHECK(model.predict(train) == labels);
}

TEST_CASE("hand fixture: k=3 votes 2:1 for SF7 at x=0.4") {
    Dataset train = dataset_1d({{0, 7}, {1, 7}, {10, 12}});
    TrainedModel model = knn_train(train, knn_hp(3), &train);
    CHECK(model.predict(std::vector<double>{0.4}) == 7);
}

TEST_CASE("equidistant vote tie resolves to the lowest SF") {
    Dataset train = dataset_1d({{0, 7}, {2, 12}});
    TrainedModel model = knn_train(train, knn_hp(2), &train);
    CHECK(model.predict(std::vector<double>{1.0}) == 7);

    // Same distances, labels swapped in storage order: still lowest SF.
    Dataset swapped = dataset_1d({{0, 12}, {2, 7}});
    TrainedModel model2 = knn_train(swapped, knn_hp(2), &swapped);
    CHECK(model2.predict(std::vector<double>{1.0}) == 7);
}

TEST_CASE("distance ties at the k-th boundary prefer the lower row index") {
    // Rows 0 and 2 are equidistant from x=1 with k=1: row 0 wins.
    Dataset train = dataset_1d({{0, 9}, {5, 8}, {2, 12}});
    TrainedModel model = knn_train(train, knn_hp(1), &train);
    CHECK(model.predict(std::vector<double>{1.0}) == 9);
}

TEST_CASE("k scan: self-evaluation is dominated by k=1") {
    Rng rng(33);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        values.push_back(rng.next_normal() * 5);
        labels.push_back(7 + static_cast<int>(rng.next_index(6)));
    }
    Dataset train({"RSSI"}, values, labels);
    const KnnKScan scan = knn_select_best_k(train, train, 1, 20, false);
    CHECK(scan.best_k == 1);
    CHECK(scan.weighted_f1_per_k.size() == 20);
    CHECK(scan.weighted_f1_per_k[0] == doctest::Approx(1.0));
}

TEST_CASE("k scan matches a brute-force oracle on a two-cluster fixture") {
    Rng rng(55);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {  // cluster A around (0,0) labelled 7
        values.push_back(rng.next_normal() * 0.2);
        values.push_back(rng.next_normal() * 0.2);
        labels.push_back(7);
    }
    for (int i = 0; i < 10; ++i) {  // cluster B around (5,5) labelled 12
        values.push_back(5 + rng.next_normal() * 0.2);
        values.push_back(5 + rng.next_normal() * 0.2);
        labels.push_back(12);
    }
    Dataset train({"RSSI", "SNR"}, values, labels);

    std::vector<double> eval_values = {0.5, 0.4, 0.2, -0.1, 4.8, 5.1, 0.3, 0.3};
    Dataset eval({"RSSI", "SNR"}, eval_values, {7, 7, 12, 7});

    const KnnKScan scan = knn_select_best_k(train, eval, 1, 20, false);

    // Oracle: re-evaluate every k with the naive implementation.
    int oracle_best_k = 0;
    double oracle_best_f1 = -1.0;
    for (int k = 1; k <= 20; ++k) {
        std::vector<int> preds;
        for (std::size_t i = 0; i < eval.rows(); ++i) {
            preds.push_back(naive_knn(train, eval.row(i), k));
        }
        const double f1 = f1_weighted(eval.labels(), preds).first;
        CHECK(scan.weighted_f1_per_k[static_cast<std::size_t>(k - 1)] == doctest::Approx(f1));
        if (f1 > oracle_best_f1) {
            oracle_best_f1 = f1;
            oracle_best_k = k;
        }
    }
    CHECK(scan.best_k == oracle_best_k);
}

TEST_CASE("knn predictions agree with the naive oracle on random data") {
    Rng rng(321);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 80; ++i) {
        values.push_back(rng.next_normal());
        values.push_back(rng.next_normal());
        values.push_back(rng.next_normal());
        labels.push_back(7 + static_cast<int>(rng.next_index(4)));
    }
    Dataset train({"RSSI", "SNR", "Distance"}, values, labels);

    for (int k : {1, 3, 7}) {
        TrainedModel model = knn_train(train, knn_hp(k), &train);
        for (int t = 0; t < 30; ++t) {
            const std::vector<double> x = {rng.next_normal(), rng.next_normal(),
                                           rng.next_normal()};
            CHECK(model.predict(x) == naive_knn(train, x, k));
        }
    }
}

TEST_CASE("k range is clamped to the training size") {
    Dataset train = dataset_1d({{0, 7}, {1, 8}, {2, 9}});
    const KnnKScan scan = knn_select_best_k(train, train, 1, 20, false);
    CHECK(scan.weighted_f1_per_k.size() == 3);  // k in 1..3 only
}

TEST_CASE("k scan requires a non-empty eval set") {
    Dataset train = dataset_1d({{0, 7}, {1, 8}});
    Dataset empty({"RSSI"}, {}, {});
    CHECK_THROWS_AS(knn_select_best_k(train, empty, 1, 5, false), std::invalid_argument);
}

TEST_CASE("evaluation-set mode requires the eval dataset") {
    Dataset train = dataset_1d({{0, 7}, {1, 8}});
    CHECK_THROWS_AS(knn_train(train, knn_hp(1), nullptr), std::invalid_argument);
}

TEST_CASE("validation-split mode trains without an eval set") {
    Rng rng(9);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) {
        const int label = i % 2 == 0 ? 7 : 12;
        values.push_back((label == 7 ? -3.0 : 3.0) + rng.next_normal() * 0.3);
        labels.push_back(label);
    }
    Dataset train({"RSSI"}, values, labels);
    Hyperparams hp;
    hp.knn_k_selection = KnnKSelection::ValidationSplit;
    TrainedModel model = knn_train(train, hp, nullptr);
    CHECK(model.knn().k >= 1);
    CHECK(model.predict(std::vector<double>{-3.0}) == 7);
    CHECK(model.predict(std::vector<double>{3.0}) == 12);
}

TEST_CASE("subsample cap keeps at most the configured rows, deterministically") {
    Rng rng(11);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 500; ++i) {
        values.push_back(rng.next_normal());
        labels.push_back(7 + static_cast<int>(rng.next_index(2)));
    }
    Dataset train({"RSSI"}, values, labels);
    Hyperparams hp = knn_hp(3);
    hp.knn_max_train_rows = 100;
    TrainedModel a = knn_train(train, hp, &train);
    TrainedModel b = knn_train(train, hp, &train);
    CHECK(a.knn().rows == 100);
    CHECK(a.knn().points == b.knn().points);
    CHECK(a.knn().labels == b.knn().labels);
}

TEST_CASE("standardized knn handles wildly different feature scales") {
    // Feature 0 carries the signal at tiny scale; feature 1 is huge noise.
    Rng rng(202);
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        const int label = i % 2 == 0 ? 7 : 12;
        values.push_back((label == 7 ? -1.0 : 1.0) * 1e-3 + rng.next_normal() * 1e-4);
        values.push_back(rng.next_normal() * 1e9);
        labels.push_back(label);
    }
    Dataset train({"RSSI", "Frequency"}, values, labels);

    Hyperparams hp = knn_hp(5);
    hp.standardize = true;
    TrainedModel model = knn_train(train, hp, &train);
    const std::vector<int> preds = model.predict(train);
    const double acc = accuracy(train.labels(), preds);
    CHECK(acc > 0.9);  // raw-scale distances would be ~coin-flip
}
