#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lorasf/lbfgs.hpp"
#include "lorasf/models.hpp"
#include "model_internal.hpp"

namespace lorasf {

namespace {

std::vector<int> distinct_sorted_labels(const std::vector<int>& labels) {
    std::vector<int> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

}  // namespace

MlrObjective::MlrObjective(const Dataset& ds, std::vector<int> classes, double l2_strength)
    : ds_(ds), classes_(std::move(classes)), p_(ds.cols()), l2_(l2_strength) {
    row_class_.resize(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        auto it = std::lower_bound(classes_.begin(), classes_.end(), ds.label(i));
        if (it == classes_.end() || *it != ds.label(i)) {
            throw std::invalid_argument("mlr: row label missing from class list");
        }
        row_class_[i] = static_cast<std::int32_t>(it - classes_.begin());
    }
}

double MlrObjective::operator()(std::span<const double> params, std::span<double> grad) const {
    const std::size_t c_count = classes_.size();
    const std::size_t n = ds_.rows();
    const double* w = params.data();             // C x p row-major
    const double* b = params.data() + c_count * p_;

    std::fill(grad.begin(), grad.end(), 0.0);
    double* gw = grad.data();
    double* gb = grad.data() + c_count * p_;

    double loss = 0.0;
    std::vector<double> z(c_count);
    const double* data = ds_.values().data();

    for (std::size_t i = 0; i < n; ++i) {
        const double* x = data + i * p_;
        double z_max = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < c_count; ++c) {
            double dot = b[c];
            const double* wc = w + c * p_;
            for (std::size_t j = 0; j < p_; ++j) dot += wc[j] * x[j];
            z[c] = dot;
            z_max = std::max(z_max, dot);
        }
        double sum_exp = 0.0;
        for (std::size_t c = 0; c < c_count; ++c) {
            z[c] = std::exp(z[c] - z_max);  // reuse z as the exp buffer
            sum_exp += z[c];
        }
        const auto y = static_cast<std::size_t>(row_class_[i]);
        // log p_y = (z_y - z_max) - log(sum_exp); z[y] currently holds exp(...)
        loss -= std::log(z[y] / sum_exp);

        for (std::size_t c = 0; c < c_count; ++c) {
            const double residual = z[c] / sum_exp - (c == y ? 1.0 : 0.0);
            double* gwc = gw + c * p_;
            for (std::size_t j = 0; j < p_; ++j) gwc[j] += residual * x[j];
            gb[c] += residual;
        }
    }

    const auto inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    for (double& g : grad) g *= inv_n;

    if (l2_ > 0.0) {
        double sq = 0.0;
        for (std::size_t k = 0; k < c_count * p_; ++k) {
            sq += w[k] * w[k];
            gw[k] += l2_ * inv_n * w[k];
        }
        loss += 0.5 * l2_ * inv_n * sq;
    }
    return loss;
}

TrainedModel mlr_train(const Dataset& train, const Hyperparams& hp) {
    require_trainable(train);
    hp.validate();
    Dataset working = train;
    std::optional<Standardizer> st;
    if (hp.standardize) {
        st = Standardizer::fit(train);
        std::vector<double> values = train.values();
        for (std::size_t i = 0; i < train.rows(); ++i) {
            st->apply(std::span<double>(values.data() + i * train.cols(), train.cols()));
        }
        working = Dataset(train.column_names(), std::move(values), train.labels());
    }

    const std::vector<int> classes = distinct_sorted_labels(working.labels());
    MlrObjective objective(working, classes, hp.mlr_l2_strength);

    LbfgsOptions options;
    options.memory = 10;
    options.max_iterations = hp.mlr_max_iter;
    options.gradient_tolerance = hp.mlr_tol;

    std::vector<double> x0(objective.param_count(), 0.0);
    LbfgsResult result = lbfgs_minimize(
        [&objective](std::span<const double> x, std::span<double> g) { return objective(x, g); },
        x0, options);

    if (!std::isfinite(result.value)) throw std::runtime_error("mlr: non-finite training loss");

    TrainedModel model;
    model.kind = ModelKind::Mlr;
    model.feature_count = working.cols();
    model.classes = classes;
    model.hyperparams = hp;
    model.standardizer = st;

    MlrPayload payload;
    const std::size_t c_count = classes.size();
    payload.weights.assign(result.x.begin(),
                           result.x.begin() + static_cast<std::ptrdiff_t>(c_count * working.cols()));
    payload.bias.assign(result.x.begin() + static_cast<std::ptrdiff_t>(c_count * working.cols()),
                        result.x.end());
    payload.converged = result.converged;
    payload.iterations = result.iterations;
    payload.final_grad_norm = result.gradient_norm;
    model.payload = std::move(payload);
    return model;
}

std::vector<double> TrainedModel::mlr_probabilities(std::span<const double> x) const {
    const MlrPayload& payload = mlr();
    const std::size_t c_count = classes.size();
    std::vector<double> buf;
    std::span<const double> input = x;
    if (standardizer) {
        buf = standardizer->transform(x);
        input = buf;
    }

    std::vector<double> z(c_count);
    double z_max = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < c_count; ++c) {
        double dot = payload.bias[c];
        const double* wc = payload.weights.data() + c * feature_count;
        for (std::size_t j = 0; j < feature_count; ++j) dot += wc[j] * input[j];
        z[c] = dot;
        z_max = std::max(z_max, dot);
    }
    double sum_exp = 0.0;
    for (double& v : z) {
        v = std::exp(v - z_max);
        sum_exp += v;
    }
    for (double& v : z) v /= sum_exp;
    return z;
}

int mlr_predict_one(const TrainedModel& model, std::span<const double> x) {
    const std::vector<double> probs = model.mlr_probabilities(x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs.size(); ++c) {
        if (probs[c] > probs[best]) best = c;  // strictly greater: tie -> lowest SF
    }
    return model.classes[best];
}

}  // namespace lorasf
