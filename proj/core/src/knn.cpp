#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lorasf/metrics.hpp"
#include "lorasf/models.hpp"
#include "lorasf/rng.hpp"
#include "lorasf/split.hpp"
#include "model_internal.hpp"

namespace lorasf {

namespace {

struct Neighbor {
    double dist_sq;
    std::uint32_t row;
};

// Keeps the k best (dist, row) pairs, ordered lexicographically so equal
// distances resolve to the lower training-row index.
class NeighborList {
public:
    explicit NeighborList(std::size_t capacity) : cap_(capacity) { items_.reserve(capacity); }

    void offer(double dist_sq, std::uint32_t row) {
        if (items_.size() == cap_) {
            const Neighbor& worst = items_.back();
            if (dist_sq > worst.dist_sq ||
                (dist_sq == worst.dist_sq && row > worst.row)) {
                return;
            }
            items_.pop_back();
        }
        Neighbor candidate{dist_sq, row};
        auto pos = std::upper_bound(items_.begin(), items_.end(), candidate,
                                    [](const Neighbor& a, const Neighbor& b) {
                                        return a.dist_sq < b.dist_sq ||
                                               (a.dist_sq == b.dist_sq && a.row < b.row);
                                    });
        items_.insert(pos, candidate);
    }

    std::span<const Neighbor> items() const { return items_; }

private:
    std::size_t cap_;
    std::vector<Neighbor> items_;
};

double dist_sq(const double* a, const double* b, std::size_t p) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

// Majority vote over the first k neighbors; vote ties resolve to the
// lowest SF class.
int vote(std::span<const Neighbor> neighbors, std::size_t k, const std::vector<int>& train_labels,
         const std::vector<int>& classes) {
    std::array<int, 16> counts{};  // classes.size() <= 6 in practice
    if (classes.size() > counts.size()) throw std::logic_error("too many classes for knn vote");
    for (std::size_t i = 0; i < k && i < neighbors.size(); ++i) {
        const int label = train_labels[neighbors[i].row];
        const auto it = std::lower_bound(classes.begin(), classes.end(), label);
        ++counts[static_cast<std::size_t>(it - classes.begin())];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes.size(); ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return classes[best];
}

std::vector<int> distinct_sorted_labels(const std::vector<int>& labels) {
    std::vector<int> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

// Neighbor lists of every eval row against the stored training matrix.
std::vector<std::vector<Neighbor>> neighbor_lists(const std::vector<double>& train_points,
                                                  std::size_t train_rows, std::size_t p,
                                                  const Dataset& eval,
                                                  const Standardizer* standardizer,
                                                  std::size_t k_max) {
    std::vector<std::vector<Neighbor>> lists;
    lists.reserve(eval.rows());
    std::vector<double> buf;
    for (std::size_t i = 0; i < eval.rows(); ++i) {
        std::span<const double> x = eval.row(i);
        if (standardizer) {
            buf = standardizer->transform(x);
            x = buf;
        }
        NeighborList nl(k_max);
        const double* base = train_points.data();
        for (std::uint32_t r = 0; r < train_rows; ++r) {
            nl.offer(dist_sq(base + r * p, x.data(), p), r);
        }
        lists.emplace_back(nl.items().begin(), nl.items().end());
    }
    return lists;
}

}  // namespace

KnnKScan knn_select_best_k(const Dataset& train, const Dataset& eval, int k_min, int k_max,
                           bool standardize) {
    if (train.empty()) throw std::invalid_argument("knn k scan: empty training set");
    if (eval.empty()) throw std::invalid_argument("knn k scan: empty evaluation set");
    if (k_min < 1 || k_max < k_min) throw std::invalid_argument("knn k scan: bad k range");
    k_max = std::min<int>(k_max, static_cast<int>(train.rows()));
    k_min = std::min(k_min, k_max);

    std::optional<Standardizer> st;
    std::vector<double> points = train.values();
    if (standardize) {
        st = Standardizer::fit(train);
        for (std::size_t i = 0; i < train.rows(); ++i) {
            st->apply(std::span<double>(points.data() + i * train.cols(), train.cols()));
        }
    }

    const std::vector<int> classes = distinct_sorted_labels(train.labels());
    const auto lists = neighbor_lists(points, train.rows(), train.cols(), eval,
                                      st ? &*st : nullptr, static_cast<std::size_t>(k_max));

    KnnKScan scan;
    scan.k_min = k_min;
    double best_f1 = -1.0;
    std::vector<int> preds(eval.rows());
    for (int k = k_min; k <= k_max; ++k) {
        for (std::size_t i = 0; i < eval.rows(); ++i) {
            preds[i] = vote(lists[i], static_cast<std::size_t>(k), train.labels(), classes);
        }
        const auto [f1, per_class] = f1_weighted(eval.labels(), preds);
        scan.weighted_f1_per_k.push_back(f1);
        if (f1 > best_f1) {  // strictly greater: ties go to the smaller k
            best_f1 = f1;
            scan.best_k = k;
        }
    }
    return scan;
}

TrainedModel knn_train(const Dataset& train, const Hyperparams& hp, const Dataset* eval_for_k) {
    require_trainable(train);
    hp.validate();
    Dataset working = train;

    // Optional subsample cap for very large training sets.
    if (hp.knn_max_train_rows > 0 && train.rows() > hp.knn_max_train_rows) {
        Rng rng(derive_seed(hp.knn_subsample_seed, {seed_stream::kKnnSubsample}));
        std::vector<std::size_t> idx(train.rows());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < hp.knn_max_train_rows; ++i) {
            std::swap(idx[i], idx[i + rng.next_index(idx.size() - i)]);
        }
        idx.resize(hp.knn_max_train_rows);
        std::sort(idx.begin(), idx.end());  // keep original row order
        std::vector<double> values;
        std::vector<int> labels;
        values.reserve(idx.size() * train.cols());
        labels.reserve(idx.size());
        for (std::size_t i : idx) {
            auto row = train.row(i);
            values.insert(values.end(), row.begin(), row.end());
            labels.push_back(train.label(i));
        }
        working = Dataset(train.column_names(), std::move(values), std::move(labels));
    }

    KnnKScan scan;
    if (hp.knn_k_selection == KnnKSelection::EvaluationSet) {
        if (!eval_for_k) {
            throw std::invalid_argument(
                "k-NN k selection needs an evaluation set in EvaluationSet mode");
        }
        scan = knn_select_best_k(working, *eval_for_k, hp.knn_k_min, hp.knn_k_max, hp.standardize);
    } else {
        SplitSpec spec;
        spec.train_fraction = hp.knn_validation_fraction;
        spec.seed = derive_seed(hp.knn_subsample_seed, {seed_stream::kRun, 1});
        SplitResult inner = train_test_split(working, spec);
        scan = knn_select_best_k(inner.train, inner.test, hp.knn_k_min, hp.knn_k_max,
                                 hp.standardize);
    }

    TrainedModel model;
    model.kind = ModelKind::Knn;
    model.feature_count = working.cols();
    model.classes = distinct_sorted_labels(working.labels());
    model.hyperparams = hp;

    KnnPayload payload;
    payload.k = scan.best_k;
    payload.rows = working.rows();
    payload.points = working.values();
    payload.labels = working.labels();
    payload.f1_per_k = scan.weighted_f1_per_k;
    if (hp.standardize) {
        model.standardizer = Standardizer::fit(working);
        for (std::size_t i = 0; i < payload.rows; ++i) {
            model.standardizer->apply(
                std::span<double>(payload.points.data() + i * working.cols(), working.cols()));
        }
    }
    model.payload = std::move(payload);
    return model;
}

int knn_predict_one(const TrainedModel& model, std::span<const double> x) {
    const KnnPayload& payload = model.knn();
    std::vector<double> buf;
    std::span<const double> query = x;
    if (model.standardizer) {
        buf = model.standardizer->transform(x);
        query = buf;
    }
    NeighborList nl(static_cast<std::size_t>(payload.k));
    const std::size_t p = model.feature_count;
    for (std::uint32_t r = 0; r < payload.rows; ++r) {
        nl.offer(dist_sq(payload.points.data() + r * p, query.data(), p), r);
    }
    return vote(nl.items(), static_cast<std::size_t>(payload.k), payload.labels, model.classes);
}

}  // namespace lorasf
