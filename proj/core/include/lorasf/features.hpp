#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lorasf {

/// The five candidate radio features, in canonical order. The canonical
/// order (RSSI, SNR, Frequency, Height, Distance) is fixed: it drives
/// column projection and feature-vector layout everywhere.
enum class FeatureId : int {
    Rssi = 0,
    Snr = 1,
    Frequency = 2,
    Height = 3,
    Distance = 4,
};

inline constexpr int kFeatureCount = 5;

inline constexpr std::array<FeatureId, kFeatureCount> kAllFeatures = {
    FeatureId::Rssi, FeatureId::Snr, FeatureId::Frequency,
    FeatureId::Height, FeatureId::Distance,
};

const std::string& feature_name(FeatureId id);

/// A non-empty subset of the five features together with its serial number
/// (1-31) and its display label. Serials and labels follow a fixed published
/// ordering that is not lexicographic, so they are stored as a literal table
/// rather than generated.
struct FeatureSet {
    int serial = 0;
    std::uint8_t mask = 0;         // bit i set <=> canonical feature i present
    std::string label;             // "+"-joined names in the printed order

    bool contains(FeatureId id) const { return (mask >> static_cast<int>(id)) & 1; }
    int size() const;

    /// Members in canonical order (the projection/column order).
    std::vector<FeatureId> members() const;
};

/// The 31 feature subsets, serial-ascending.
class ComboCatalog {
public:
    static const ComboCatalog& instance();

    std::span<const FeatureSet> all() const { return combos_; }
    const FeatureSet& by_serial(int serial) const;
    std::size_t size() const { return combos_.size(); }

    /// JSON dump (serial, label, members) for report tooling.
    std::string to_json() const;

private:
    ComboCatalog();
    std::vector<FeatureSet> combos_;
};

/// Returns the full 31-entry catalog.
const ComboCatalog& enumerate_combinations();

/// The display label for a feature set ("RSSI+SNR", ...).
const std::string& combo_label(const FeatureSet& fs);

}  // namespace lorasf
