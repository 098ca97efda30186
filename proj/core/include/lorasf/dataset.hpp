#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lorasf/features.hpp"

namespace lorasf {

/// Binds each logical column to the header name it carries in a concrete
/// CSV file. Header strings differ between dataset exports, so the binding
/// is configuration, not code.
struct ColumnMapping {
    std::string rssi_dBm = "RSSI";
    std::string snr_dB = "SNR";
    std::string frequency_Hz = "Frequency";
    std::string distance_m = "Distance";
    std::string antenna_height_ed_m = "Height";
    std::string sf_label = "SF";

    /// Identity mapping: logical columns bound to the canonical feature names.
    static ColumnMapping canonical();

    static ColumnMapping from_json_file(const std::filesystem::path& path);
    static ColumnMapping from_json(const std::string& text);
    std::string to_json() const;

    /// Header name for a canonical feature.
    const std::string& header_for(FeatureId id) const;

    /// Throws if the six bindings are not pairwise distinct or any is empty.
    void validate() const;
};

/// Immutable after construction: rows of 64-bit feature values plus an
/// integer SF class label (7-12) per row. Column order is fixed at load.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<std::string> column_names, std::vector<double> values,
            std::vector<int> labels);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return column_names_.size(); }
    bool empty() const { return labels_.empty(); }

    const std::vector<std::string>& column_names() const { return column_names_; }
    const std::vector<int>& labels() const { return labels_; }
    int label(std::size_t i) const { return labels_[i]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols(), cols()};
    }
    double value(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
    const std::vector<double>& values() const { return values_; }

    /// Index of a named column; throws naming the column when absent.
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    /// FNV-1a over shape, column names, value bits and labels. Used as the
    /// identity key for resume bookkeeping and split-partition checks.
    std::uint64_t content_hash() const;

private:
    std::vector<std::string> column_names_;
    std::vector<double> values_;  // row-major, rows() x cols()
    std::vector<int> labels_;
};

inline constexpr int kSfMin = 7;
inline constexpr int kSfMax = 12;

/// Row-rejection counters from CSV ingestion.
struct LoadStats {
    std::size_t rows_accepted = 0;
    std::size_t rejected_non_numeric = 0;
    std::size_t rejected_sf_out_of_range = 0;
    std::size_t rejected_wrong_field_count = 0;

    std::size_t rejected_total() const {
        return rejected_non_numeric + rejected_sf_out_of_range + rejected_wrong_field_count;
    }
    std::string to_json() const;
};

/// Reads a CSV with a header row and returns the five mapped feature columns
/// (canonical order) plus the SF label column. Unmapped columns are ignored.
/// Rows with unparseable numerics or SF outside [7, 12] are rejected and
/// counted in stats.
Dataset load_csv(const std::filesystem::path& path, const ColumnMapping& mapping,
                 LoadStats* stats = nullptr);

/// Writes header + rows, shortest round-trip float encoding, so that
/// load_csv(write_csv(ds)) reproduces ds bit-exactly.
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& sf_column_name = "SF");

struct CleanStats {
    std::size_t dropped_nan = 0;
    std::size_t dropped_inf = 0;

    std::size_t dropped_total() const { return dropped_nan + dropped_inf; }
    std::string to_json() const;
};

/// Removes rows containing NaN or +/-Inf in any column, preserving row
/// order. Throws if nothing survives.
Dataset clean(const Dataset& ds, CleanStats* stats = nullptr);

/// Projects the dataset onto the feature subset, columns in canonical order,
/// labels unchanged.
Dataset select_features(const Dataset& ds, const FeatureSet& fs);

}  // namespace lorasf
