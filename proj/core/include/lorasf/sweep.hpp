#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lorasf/dataset.hpp"
#include "lorasf/features.hpp"
#include "lorasf/metrics.hpp"
#include "lorasf/models.hpp"
#include "lorasf/split.hpp"

namespace lorasf {

struct SweepPlan {
    std::vector<int> serials;          // empty = all 31
    std::vector<ModelKind> kinds;      // empty = all four
    Hyperparams hyperparams;
    SplitSpec split;
    std::uint64_t base_seed = 42;
    int workers = 1;
    bool keep_going = false;

    std::vector<int> effective_serials() const;
    std::vector<ModelKind> effective_kinds() const;
    void validate() const;
};

/// Outcome of one (combination, model kind) run.
struct EvalRun {
    int serial = 0;
    std::string label;
    ModelKind kind{};
    int chosen_k = 0;  // k-NN only, 0 otherwise
    double accuracy = 0.0;
    double weighted_f1 = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    ConfusionMatrix confusion;
    double seconds = 0.0;          // wall-clock train+eval, excluded from canonical form
    std::uint64_t partition_hash = 0;
    std::uint64_t model_seed = 0;
    bool failed = false;
    std::string error;
};

struct SerialAverage {
    int serial = 0;
    double avg_accuracy = 0.0;
    double avg_weighted_f1 = 0.0;
};

struct SweepMetadata {
    std::uint64_t dataset_hash = 0;
    std::uint64_t base_seed = 42;
    SplitSpec split;
    bool standardize = false;
    std::string hyperparams_json;
    std::string software_version;
    std::vector<int> serials;
    std::vector<std::string> kinds;
};

struct SweepReport {
    SweepMetadata metadata;
    std::vector<EvalRun> runs;            // ordered by (serial, kind)
    std::vector<SerialAverage> averages;  // serials with all four kinds present

    /// include_timing=false gives the canonical form used for byte
    /// comparison across runs.
    std::string to_json(bool include_timing = true) const;
    static SweepReport from_json(const std::string& text);

    /// Flat CSV, one row per run: serial,label,kind,acc,f1,k,seconds.
    std::string to_csv() const;
};

using SweepProgress = std::function<void(const EvalRun&, std::size_t done, std::size_t total)>;

/// Runs |serials| x |kinds| train/evaluate jobs against a single shared
/// 80/20 partition of ds. Model seeds derive from (base_seed, serial, kind),
/// so results are identical at any worker count and runs never perturb each
/// other. resume_from, when given, supplies completed runs to reuse (keyed
/// by dataset hash, seeds and run identity).
SweepReport run_sweep(const Dataset& ds, const SweepPlan& plan,
                      const SweepReport* resume_from = nullptr,
                      const SweepProgress& progress = nullptr,
                      const std::atomic<bool>* cancel = nullptr);

/// Arithmetic mean of accuracy / weighted F1 across the four kinds, per
/// serial. Throws if a serial is missing a kind (unless that run failed and
/// partial results are acceptable to the caller).
std::vector<SerialAverage> aggregate_averages(const std::vector<EvalRun>& runs);

}  // namespace lorasf
