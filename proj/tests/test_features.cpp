#include <doctest.h>

#include <map>
#include <set>

#include "lorasf/features.hpp"

using namespace lorasf;

TEST_CASE("catalog has exactly 31 combinations, serial-ascending") {
    const ComboCatalog& catalog = enumerate_combinations();
    REQUIRE(catalog.size() == 31);
    int expected = 1;
    for (const FeatureSet& fs : catalog.all()) {
        CHECK(fs.serial == expected);
        ++expected;
    }
}

TEST_CASE("subset size histogram is 5/10/10/5/1") {
    std::map<int, int> histogram;
    for (const FeatureSet& fs : enumerate_combinations().all()) ++histogram[fs.size()];
    CHECK(histogram[1] == 5);
    CHECK(histogram[2] == 10);
    CHECK(histogram[3] == 10);
    CHECK(histogram[4] == 5);
    CHECK(histogram[5] == 1);
}

TEST_CASE("serial-to-members table spot checks") {
    const ComboCatalog& catalog = enumerate_combinations();

    const FeatureSet& s6 = catalog.by_serial(6);
    CHECK(s6.label == "RSSI+SNR");
    CHECK(s6.members() == std::vector<FeatureId>{FeatureId::Rssi, FeatureId::Snr});

    const FeatureSet& s16 = catalog.by_serial(16);
    CHECK(s16.label == "RSSI+SNR+Distance");
    CHECK(s16.members() ==
          std::vector<FeatureId>{FeatureId::Rssi, FeatureId::Snr, FeatureId::Distance});

    const FeatureSet& s30 = catalog.by_serial(30);
    CHECK(s30.label == "Frequency+SNR+Distance+Height");
    // Canonical member order differs from the label's printed order.
    CHECK(s30.members() == std::vector<FeatureId>{FeatureId::Snr, FeatureId::Frequency,
                                                  FeatureId::Height, FeatureId::Distance});

    CHECK(catalog.by_serial(3).label == "Frequency");
    CHECK(catalog.by_serial(31).size() == 5);
    CHECK(catalog.by_serial(31).label == "RSSI+SNR+Frequency+Distance+Height");
}

TEST_CASE("singles come first in canonical order") {
    const ComboCatalog& catalog = enumerate_combinations();
    for (int serial = 1; serial <= 5; ++serial) {
        const FeatureSet& fs = catalog.by_serial(serial);
        REQUIRE(fs.size() == 1);
        CHECK(static_cast<int>(fs.members()[0]) == serial - 1);
        CHECK(fs.label == feature_name(fs.members()[0]));
    }
}

TEST_CASE("serial to mask mapping is a bijection") {
    std::set<std::uint8_t> masks;
    for (const FeatureSet& fs : enumerate_combinations().all()) {
        CHECK(fs.mask != 0);
        CHECK(masks.insert(fs.mask).second);
    }
    CHECK(masks.size() == 31);
}

TEST_CASE("labels name exactly the members of each mask") {
    for (const FeatureSet& fs : enumerate_combinations().all()) {
        for (FeatureId id : kAllFeatures) {
            const bool in_label = fs.label.find(feature_name(id)) != std::string::npos;
            CHECK(in_label == fs.contains(id));
        }
    }
}

TEST_CASE("combo_label returns the stored label") {
    const FeatureSet& fs = enumerate_combinations().by_serial(30);
    CHECK(combo_label(fs) == "Frequency+SNR+Distance+Height");
}

TEST_CASE("catalog json dump lists serial, label and members") {
    const std::string json = enumerate_combinations().to_json();
    CHECK(json.find("\"serial\": 6") != std::string::npos);
    CHECK(json.find("RSSI+SNR") != std::string::npos);
}

TEST_CASE("by_serial rejects out-of-range serials") {
    CHECK_THROWS(enumerate_combinations().by_serial(0));
    CHECK_THROWS(enumerate_combinations().by_serial(32));
}
