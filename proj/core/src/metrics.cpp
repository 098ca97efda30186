#include "lorasf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace lorasf {

namespace {

void require_paired_nonempty(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("label vectors differ in length");
    }
    if (y_true.empty()) throw std::invalid_argument("label vectors are empty");
}

std::vector<int> class_union(std::span<const int> y_true, std::span<const int> y_pred) {
    std::vector<int> classes(y_true.begin(), y_true.end());
    classes.insert(classes.end(), y_pred.begin(), y_pred.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

}  // namespace

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (std::int64_t c : counts) sum += c;
    return sum;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < size(); ++i) sum += at(i, i);
    return sum;
}

int ConfusionMatrix::class_index(int label) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label) return -1;
    return static_cast<int>(it - classes.begin());
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
    require_paired_nonempty(y_true, y_pred);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == y_pred[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(y_true.size());
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred) {
    require_paired_nonempty(y_true, y_pred);
    ConfusionMatrix cm;
    cm.classes = class_union(y_true, y_pred);
    const std::size_t c = cm.classes.size();
    cm.counts.assign(c * c, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = static_cast<std::size_t>(cm.class_index(y_true[i]));
        const auto p = static_cast<std::size_t>(cm.class_index(y_pred[i]));
        ++cm.counts[t * c + p];
    }
    return cm;
}

ClassificationReport classification_report(std::span<const int> y_true,
                                           std::span<const int> y_pred) {
    require_paired_nonempty(y_true, y_pred);

    const std::vector<int> classes = class_union(y_true, y_pred);
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;

    // Direct TP/FP/FN counting, no confusion-matrix indirection.
    std::vector<std::int64_t> tp(classes.size(), 0);
    std::vector<std::int64_t> fp(classes.size(), 0);
    std::vector<std::int64_t> fn(classes.size(), 0);
    std::vector<std::int64_t> support(classes.size(), 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const std::size_t t = index[y_true[i]];
        const std::size_t p = index[y_pred[i]];
        ++support[t];
        if (t == p) {
            ++tp[t];
        } else {
            ++fn[t];
            ++fp[p];
        }
    }

    ClassificationReport report;
    report.accuracy = accuracy(y_true, y_pred);
    report.confusion = confusion_matrix(y_true, y_pred);

    const auto n = static_cast<double>(y_true.size());
    double weighted = 0.0;
    double macro = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        ClassMetrics m;
        m.label = classes[c];
        m.support = support[c];
        const std::int64_t pp = tp[c] + fp[c];
        const std::int64_t ap = tp[c] + fn[c];
        if (pp == 0) ++report.zero_division_count;
        if (ap == 0) ++report.zero_division_count;
        m.precision = pp == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(pp);
        m.recall = ap == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(ap);
        const double pr = m.precision + m.recall;
        m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
        weighted += (static_cast<double>(m.support) / n) * m.f1;
        macro += m.f1;
        report.per_class.push_back(m);
    }
    report.weighted_f1 = weighted;
    report.macro_f1 = macro / static_cast<double>(classes.size());
    return report;
}

std::string ClassificationReport::to_json() const {
    nlohmann::json per_class_json = nlohmann::json::array();
    for (const ClassMetrics& m : per_class) {
        per_class_json.push_back({
            {"label", m.label},
            {"support", m.support},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
        });
    }
    nlohmann::json counts = nlohmann::json::array();
    for (std::size_t t = 0; t < confusion.size(); ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t p = 0; p < confusion.size(); ++p) row.push_back(confusion.at(t, p));
        counts.push_back(std::move(row));
    }
    nlohmann::json j = {
        {"accuracy", accuracy},
        {"weighted_f1", weighted_f1},
        {"macro_f1", macro_f1},
        {"per_class", std::move(per_class_json)},
        {"confusion", {{"classes", confusion.classes}, {"counts", std::move(counts)}}},
        {"zero_division_count", zero_division_count},
    };
    return j.dump(2);
}

std::pair<double, std::vector<ClassMetrics>> f1_weighted(std::span<const int> y_true,
                                                         std::span<const int> y_pred) {
    ClassificationReport report = classification_report(y_true, y_pred);
    return {report.weighted_f1, std::move(report.per_class)};
}

double weighted_f1_from_confusion(const ConfusionMatrix& cm) {
    const std::size_t c = cm.size();
    const auto n = static_cast<double>(cm.total());
    if (n == 0) throw std::invalid_argument("empty confusion matrix");

    double weighted = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        std::int64_t tp = cm.at(k, k);
        std::int64_t row = 0;  // support: all of true class k
        std::int64_t col = 0;  // everything predicted as k
        for (std::size_t j = 0; j < c; ++j) {
            row += cm.at(k, j);
            col += cm.at(j, k);
        }
        const double precision = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
        const double recall = row == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row);
        const double pr = precision + recall;
        const double f1 = pr == 0.0 ? 0.0 : 2.0 * precision * recall / pr;
        weighted += (static_cast<double>(row) / n) * f1;
    }
    return weighted;
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: vectors differ in length");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 samples");

    const auto n = static_cast<double>(x.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;

    double cov = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }

    if (var_x == 0.0 || var_y == 0.0) return {0.0, true};
    return {cov / std::sqrt(var_x * var_y), false};
}

const FeatureCorrelation& CorrelationReport::by_rank(int rank) const {
    for (const FeatureCorrelation& e : entries) {
        if (e.rank == rank) return e;
    }
    throw std::out_of_range("no feature with rank " + std::to_string(rank));
}

std::string CorrelationReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const FeatureCorrelation& e : entries) {
        arr.push_back({
            {"feature", feature_name(e.feature)},
            {"r", e.r},
            {"abs_r", e.abs_r},
            {"rank", e.rank},
            {"degenerate", e.degenerate},
        });
    }
    nlohmann::json j = {{"sample_count", sample_count}, {"features", arr}};
    return j.dump(2);
}

CorrelationReport rank_features(const Dataset& ds) {
    CorrelationReport report;
    report.sample_count = ds.rows();

    std::vector<double> y(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) y[i] = static_cast<double>(ds.label(i));

    std::vector<double> x(ds.rows());
    for (FeatureId id : kAllFeatures) {
        const std::size_t col = ds.column_index(feature_name(id));
        for (std::size_t i = 0; i < ds.rows(); ++i) x[i] = ds.value(i, col);
        const PearsonResult pr = pearson(x, y);
        FeatureCorrelation fc;
        fc.feature = id;
        fc.r = pr.r;
        fc.abs_r = std::abs(pr.r);
        fc.degenerate = pr.degenerate;
        report.entries.push_back(fc);
    }

    // Rank by |r| descending; degenerate features last; remaining ties by
    // canonical order (entries are already canonical-ordered, stable sort).
    std::vector<std::size_t> order(report.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = report.entries[a];
        const auto& eb = report.entries[b];
        if (ea.degenerate != eb.degenerate) return !ea.degenerate;
        return ea.abs_r > eb.abs_r;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        report.entries[order[pos]].rank = static_cast<int>(pos) + 1;
    }
    return report;
}

}  // namespace lorasf
