#include "lorasf/split.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lorasf/rng.hpp"

namespace lorasf {

namespace {

// Fisher-Yates with our own Rng; std::shuffle is implementation-defined.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::swap(idx[i - 1], idx[rng.next_index(i)]);
    }
}

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    std::vector<double> values;
    std::vector<int> labels;
    values.reserve(rows.size() * ds.cols());
    labels.reserve(rows.size());
    for (std::size_t i : rows) {
        auto row = ds.row(i);
        values.insert(values.end(), row.begin(), row.end());
        labels.push_back(ds.label(i));
    }
    return Dataset(ds.column_names(), std::move(values), std::move(labels));
}

}  // namespace

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
    }
}

SplitResult train_test_split(const Dataset& ds, const SplitSpec& spec) {
    spec.validate();
    if (ds.empty()) throw std::invalid_argument("cannot split an empty dataset");

    const std::size_t n = ds.rows();
    Rng rng(spec.seed);

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;

    if (!spec.stratified) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        shuffle_indices(idx, rng);
        const auto n_train = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * spec.train_fraction));
        train_idx.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_idx.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    } else {
        // Per-class shuffle with the floor convention applied per class;
        // classes processed in ascending label order for determinism.
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < n; ++i) by_class[ds.label(i)].push_back(i);
        for (auto& [label, idx] : by_class) {
            shuffle_indices(idx, rng);
            const auto n_train = static_cast<std::size_t>(
                std::floor(static_cast<double>(idx.size()) * spec.train_fraction));
            train_idx.insert(train_idx.end(), idx.begin(),
                             idx.begin() + static_cast<std::ptrdiff_t>(n_train));
            test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                            idx.end());
        }
    }

    if (train_idx.empty() || test_idx.empty()) {
        throw std::runtime_error("split produced an empty train or test partition");
    }

    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return SplitResult{take_rows(ds, train_idx), take_rows(ds, test_idx)};
}

}  // namespace lorasf
