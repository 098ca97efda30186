#include "lorasf/features.hpp"

#include <bit>
#include <stdexcept>

#include <json.hpp>

namespace lorasf {

namespace {

constexpr std::uint8_t kR = 1u << 0;  // RSSI
constexpr std::uint8_t kS = 1u << 1;  // SNR
constexpr std::uint8_t kF = 1u << 2;  // Frequency
constexpr std::uint8_t kH = 1u << 3;  // Height
constexpr std::uint8_t kD = 1u << 4;  // Distance

struct ComboRow {
    int serial;
    std::uint8_t mask;
    const char* label;
};

// Literal serial table. The ordering within each size group is not
// lexicographic (e.g. 16 is RSSI+SNR+Distance but 18 is RSSI+SNR+Frequency),
// so the table is transcribed verbatim rather than generated. Labels keep
// their printed member order even where it differs from canonical order
// (e.g. serial 30).
constexpr ComboRow kComboTable[31] = {
    {1, kR, "RSSI"},
    {2, kS, "SNR"},
    {3, kF, "Frequency"},
    {4, kH, "Height"},
    {5, kD, "Distance"},
    {6, static_cast<std::uint8_t>(kR | kS), "RSSI+SNR"},
    {7, static_cast<std::uint8_t>(kR | kF), "RSSI+Frequency"},
    {8, static_cast<std::uint8_t>(kR | kH), "RSSI+Height"},
    {9, static_cast<std::uint8_t>(kR | kD), "RSSI+Distance"},
    {10, static_cast<std::uint8_t>(kS | kF), "SNR+Frequency"},
    {11, static_cast<std::uint8_t>(kS | kH), "SNR+Height"},
    {12, static_cast<std::uint8_t>(kS | kD), "SNR+Distance"},
    {13, static_cast<std::uint8_t>(kF | kH), "Frequency+Height"},
    {14, static_cast<std::uint8_t>(kF | kD), "Frequency+Distance"},
    {15, static_cast<std::uint8_t>(kH | kD), "Height+Distance"},
    {16, static_cast<std::uint8_t>(kR | kS | kD), "RSSI+SNR+Distance"},
    {17, static_cast<std::uint8_t>(kR | kS | kH), "RSSI+SNR+Height"},
    {18, static_cast<std::uint8_t>(kR | kS | kF), "RSSI+SNR+Frequency"},
    {19, static_cast<std::uint8_t>(kR | kD | kH), "RSSI+Distance+Height"},
    {20, static_cast<std::uint8_t>(kR | kD | kF), "RSSI+Distance+Frequency"},
    {21, static_cast<std::uint8_t>(kR | kH | kF), "RSSI+Height+Frequency"},
    {22, static_cast<std::uint8_t>(kS | kD | kH), "SNR+Distance+Height"},
    {23, static_cast<std::uint8_t>(kS | kD | kF), "SNR+Distance+Frequency"},
    {24, static_cast<std::uint8_t>(kS | kF | kH), "SNR+Frequency+Height"},
    {25, static_cast<std::uint8_t>(kF | kD | kH), "Frequency+Distance+Height"},
    {26, static_cast<std::uint8_t>(kR | kS | kD | kH), "RSSI+SNR+Distance+Height"},
    {27, static_cast<std::uint8_t>(kR | kS | kD | kF), "RSSI+SNR+Distance+Frequency"},
    {28, static_cast<std::uint8_t>(kR | kS | kF | kH), "RSSI+SNR+Frequency+Height"},
    {29, static_cast<std::uint8_t>(kR | kF | kD | kH), "RSSI+Frequency+Distance+Height"},
    {30, static_cast<std::uint8_t>(kF | kS | kD | kH), "Frequency+SNR+Distance+Height"},
    {31, static_cast<std::uint8_t>(kR | kS | kF | kH | kD), "RSSI+SNR+Frequency+Distance+Height"},
};

const std::array<std::string, kFeatureCount> kFeatureNames = {
    "RSSI", "SNR", "Frequency", "Height", "Distance",
};

}  // namespace

const std::string& feature_name(FeatureId id) {
    return kFeatureNames.at(static_cast<std::size_t>(id));
}

int FeatureSet::size() const {
    return std::popcount(static_cast<unsigned>(mask));
}

std::vector<FeatureId> FeatureSet::members() const {
    std::vector<FeatureId> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (FeatureId id : kAllFeatures) {
        if (contains(id)) out.push_back(id);
    }
    return out;
}

ComboCatalog::ComboCatalog() {
    combos_.reserve(31);
    for (const ComboRow& row : kComboTable) {
        combos_.push_back(FeatureSet{row.serial, row.mask, row.label});
    }
}

const ComboCatalog& ComboCatalog::instance() {
    static const ComboCatalog catalog;
    return catalog;
}

const FeatureSet& ComboCatalog::by_serial(int serial) const {
    if (serial < 1 || serial > static_cast<int>(combos_.size())) {
        throw std::out_of_range("combination serial out of range: " + std::to_string(serial));
    }
    return combos_[static_cast<std::size_t>(serial - 1)];
}

std::string ComboCatalog::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const FeatureSet& fs : combos_) {
        nlohmann::json members = nlohmann::json::array();
        for (FeatureId id : fs.members()) members.push_back(feature_name(id));
        arr.push_back({{"serial", fs.serial}, {"label", fs.label}, {"members", members}});
    }
    return arr.dump(2);
}

const ComboCatalog& enumerate_combinations() {
    return ComboCatalog::instance();
}

const std::string& combo_label(const FeatureSet& fs) {
    return fs.label;
}

}  // namespace lorasf
