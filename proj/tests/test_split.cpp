#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "lorasf/split.hpp"
#include "lorasf/synthetic.hpp"

using namespace lorasf;

namespace {

Dataset tiny_dataset(std::size_t n) {
    std::vector<double> values;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        values.push_back(static_cast<double>(i));
        labels.push_back(7 + static_cast<int>(i % 6));
    }
    return Dataset({"RSSI"}, std::move(values), std::move(labels));
}

std::multiset<double> value_multiset(const Dataset& ds) {
    return {ds.values().begin(), ds.values().end()};
}

}  // namespace

TEST_CASE("100 rows at 0.8 split 80/20") {
    SplitSpec spec;
    SplitResult r = train_test_split(tiny_dataset(100), spec);
    CHECK(r.train.rows() == 80);
    CHECK(r.test.rows() == 20);
}

TEST_CASE("930753 rows at 0.8 split 744602/186151") {
    SplitSpec spec;
    SplitResult r = train_test_split(tiny_dataset(930753), spec);
    CHECK(r.train.rows() == 744602);
    CHECK(r.test.rows() == 186151);
}

TEST_CASE("partition is exact: disjoint, exhaustive, label multiset preserved") {
    Dataset ds = tiny_dataset(257);
    SplitSpec spec;
    spec.seed = 99;
    SplitResult r = train_test_split(ds, spec);

    REQUIRE(r.train.rows() + r.test.rows() == ds.rows());

    // Values are unique row ids here, so multiset union equality implies a
    // true partition.
    std::multiset<double> combined = value_multiset(r.train);
    for (double v : r.test.values()) combined.insert(v);
    CHECK(combined == value_multiset(ds));

    std::multiset<int> labels_combined(r.train.labels().begin(), r.train.labels().end());
    labels_combined.insert(r.test.labels().begin(), r.test.labels().end());
    CHECK(labels_combined == std::multiset<int>(ds.labels().begin(), ds.labels().end()));
}

TEST_CASE("same seed reproduces the partition, different seeds differ") {
    Dataset ds = tiny_dataset(500);
    SplitSpec spec;
    spec.seed = 4242;
    SplitResult a = train_test_split(ds, spec);
    SplitResult b = train_test_split(ds, spec);
    CHECK(a.train.values() == b.train.values());
    CHECK(a.test.values() == b.test.values());

    spec.seed = 4243;
    SplitResult c = train_test_split(ds, spec);
    CHECK(a.train.values() != c.train.values());
}

TEST_CASE("stratified split keeps per-class train fraction within one sample") {
    SyntheticConfig cfg;
    cfg.n_rows = 5000;
    cfg.seed = 31;
    Dataset ds = generate_synthetic(cfg);

    SplitSpec spec;
    spec.stratified = true;
    SplitResult r = train_test_split(ds, spec);

    std::map<int, std::size_t> total;
    std::map<int, std::size_t> in_train;
    for (int label : ds.labels()) ++total[label];
    for (int label : r.train.labels()) ++in_train[label];

    for (const auto& [label, count] : total) {
        const double expected = 0.8 * static_cast<double>(count);
        CHECK(std::abs(static_cast<double>(in_train[label]) - expected) <= 1.0);
    }
}

TEST_CASE("row order within each side preserves dataset order") {
    Dataset ds = tiny_dataset(100);
    SplitResult r = train_test_split(ds, SplitSpec{});
    CHECK(std::is_sorted(r.train.values().begin(), r.train.values().end()));
    CHECK(std::is_sorted(r.test.values().begin(), r.test.values().end()));
}

TEST_CASE("degenerate splits error") {
    CHECK_THROWS_AS(train_test_split(tiny_dataset(1), SplitSpec{}), std::runtime_error);

    SplitSpec bad;
    bad.train_fraction = 1.0;
    CHECK_THROWS_AS(train_test_split(tiny_dataset(100), bad), std::invalid_argument);

    Dataset empty({"RSSI"}, {}, {});
    CHECK_THROWS_AS(train_test_split(empty, SplitSpec{}), std::invalid_argument);
}
