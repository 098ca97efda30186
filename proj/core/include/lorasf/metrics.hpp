#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lorasf/dataset.hpp"

namespace lorasf {

/// Square true x predicted count matrix over the ascending union of classes
/// seen in either vector.
struct ConfusionMatrix {
    std::vector<int> classes;
    std::vector<std::int64_t> counts;  // row-major, classes.size()^2

    std::size_t size() const { return classes.size(); }
    std::int64_t at(std::size_t true_idx, std::size_t pred_idx) const {
        return counts[true_idx * size() + pred_idx];
    }
    std::int64_t total() const;
    std::int64_t trace() const;
    int class_index(int label) const;  // -1 when absent
};

struct ClassMetrics {
    int label = 0;
    std::int64_t support = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassificationReport {
    double accuracy = 0.0;
    double weighted_f1 = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_class;   // ascending label order
    ConfusionMatrix confusion;
    int zero_division_count = 0;           // 0/0 precision or recall occurrences

    std::string to_json() const;
};

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred);

/// Per-class precision/recall/F1 with the 0/0 -> 0 convention, weighted F1
/// (support-weighted) and macro F1. Counts TP/FP/FN directly from the label
/// vectors; the confusion matrix is attached for reporting.
ClassificationReport classification_report(std::span<const int> y_true,
                                           std::span<const int> y_pred);

/// Weighted F1 of a prediction set. Returns the support-weighted mean of
/// per-class F1 plus the per-class table.
std::pair<double, std::vector<ClassMetrics>> f1_weighted(std::span<const int> y_true,
                                                         std::span<const int> y_pred);

/// Second route to the same number, computed from confusion-matrix cells
/// only. Kept separate from classification_report so the two paths can be
/// checked against each other.
double weighted_f1_from_confusion(const ConfusionMatrix& cm);

struct PearsonResult {
    double r = 0.0;
    bool degenerate = false;  // zero variance in x or y; r reported as 0
};

/// Pearson correlation with population moments.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

struct FeatureCorrelation {
    FeatureId feature{};
    double r = 0.0;
    double abs_r = 0.0;
    int rank = 0;  // 1 = strongest |r|
    bool degenerate = false;
};

struct CorrelationReport {
    std::vector<FeatureCorrelation> entries;  // canonical feature order
    std::size_t sample_count = 0;

    const FeatureCorrelation& by_rank(int rank) const;
    std::string to_json() const;
};

/// Pearson |r| ranking of the five canonical features against the SF label.
/// Ties break toward canonical feature order; degenerate (zero-variance)
/// features rank behind everything else.
CorrelationReport rank_features(const Dataset& ds);

}  // namespace lorasf
