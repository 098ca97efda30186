#pragma once

#include <span>

#include "lorasf/models.hpp"

namespace lorasf {

// Cross-TU helpers for the per-kind predictors; the public entry point is
// TrainedModel::predict.
int knn_predict_one(const TrainedModel& model, std::span<const double> x);
int mlr_predict_one(const TrainedModel& model, std::span<const double> x);
int forest_predict_one(const TrainedModel& model, std::span<const double> x);

// Throws on empty data, non-finite values or a single-class label set.
void require_trainable(const Dataset& train);

}  // namespace lorasf
