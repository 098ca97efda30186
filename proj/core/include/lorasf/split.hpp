#pragma once

#include <cstdint>

#include "lorasf/dataset.hpp"

namespace lorasf {

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
    bool stratified = false;

    void validate() const;
};

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// Seeded 80/20-style partition. Plain mode: uniform shuffle, train takes
/// floor(n * fraction) rows. Stratified mode: the same per class. Row order
/// within each side preserves the original dataset order, so the partition
/// is fully described by index membership.
SplitResult train_test_split(const Dataset& ds, const SplitSpec& spec);

}  // namespace lorasf
