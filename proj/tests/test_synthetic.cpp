#include <doctest.h>

#include <cmath>

#include "lorasf/synthetic.hpp"

using namespace lorasf;

namespace {

// Test-local threshold rule: scan SF7..SF12 floors independently of the
// generator's implementation.
int oracle_sf(double snr, const std::array<double, 6>& thresholds) {
    for (int i = 0; i < 6; ++i) {
        if (snr >= thresholds[static_cast<std::size_t>(i)]) return 7 + i;
    }
    return 12;
}

}  // namespace

TEST_CASE("generator produces the requested rows with labels in 7..12") {
    SyntheticConfig cfg;
    cfg.n_rows = 1000;
    cfg.seed = 7;
    Dataset ds = generate_synthetic(cfg);
    REQUIRE(ds.rows() == 1000);
    REQUIRE(ds.cols() == 5);
    for (int label : ds.labels()) {
        CHECK(label >= 7);
        CHECK(label <= 12);
    }
}

TEST_CASE("same config yields bit-identical datasets") {
    SyntheticConfig cfg;
    cfg.n_rows = 2000;
    cfg.seed = 12345;
    Dataset a = generate_synthetic(cfg);
    Dataset b = generate_synthetic(cfg);
    CHECK(a.values() == b.values());
    CHECK(a.labels() == b.labels());
    CHECK(a.content_hash() == b.content_hash());

    cfg.seed = 12346;
    Dataset c = generate_synthetic(cfg);
    CHECK(a.values() != c.values());
}

TEST_CASE("sf_from_snr: fixed SNR of -5 dB against default floors gives SF7") {
    const SyntheticConfig cfg;
    CHECK(sf_from_snr(-5.0, cfg.snr_thresholds_db) == 7);
    CHECK(sf_from_snr(-7.5, cfg.snr_thresholds_db) == 7);   // boundary inclusive
    CHECK(sf_from_snr(-11.0, cfg.snr_thresholds_db) == 9);
    CHECK(sf_from_snr(-19.9, cfg.snr_thresholds_db) == 12);
    CHECK(sf_from_snr(-40.0, cfg.snr_thresholds_db) == 12); // below every floor
}

TEST_CASE("single-distance noiseless config pins SNR at -5 dB and SF7") {
    // tx 14 - (40 + 25*log10(1000)) = -101 dBm RSSI; -101 - (-96) = -5 dB SNR.
    SyntheticConfig cfg;
    cfg.n_rows = 50;
    cfg.seed = 3;
    cfg.path_loss_exponent = 2.5;
    cfg.reference_loss_db = 40.0;
    cfg.shadowing_sigma_db = 0.0;
    cfg.snr_jitter_db = 0.0;
    cfg.tx_power_dbm = 14.0;
    cfg.noise_floor_dbm = -96.0;
    cfg.distance_min_m = 1000.0;
    cfg.distance_max_m = 1000.0;
    cfg.antenna_heights_m = {1.0};
    cfg.height_gain_db_per_m = 0.0;

    Dataset ds = generate_synthetic(cfg);
    const std::size_t snr_col = ds.column_index("SNR");
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        CHECK(ds.value(i, snr_col) == doctest::Approx(-5.0).epsilon(1e-9));
        CHECK(ds.label(i) == 7);
    }
}

TEST_CASE("noiseless generation matches the closed form row by row") {
    SyntheticConfig cfg;
    cfg.n_rows = 500;
    cfg.seed = 77;
    cfg.shadowing_sigma_db = 0.0;
    cfg.snr_jitter_db = 0.0;

    Dataset ds = generate_synthetic(cfg);
    const std::size_t rssi_col = ds.column_index("RSSI");
    const std::size_t snr_col = ds.column_index("SNR");
    const std::size_t height_col = ds.column_index("Height");
    const std::size_t dist_col = ds.column_index("Distance");

    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const double d = ds.value(i, dist_col);
        const double h = ds.value(i, height_col);
        const double expected_rssi = cfg.tx_power_dbm -
                                     (cfg.reference_loss_db +
                                      10.0 * cfg.path_loss_exponent * std::log10(d)) +
                                     cfg.height_gain_db_per_m * (h - 1.0);
        CHECK(ds.value(i, rssi_col) == doctest::Approx(expected_rssi).epsilon(1e-12));
        const double snr = ds.value(i, snr_col);
        CHECK(snr == doctest::Approx(expected_rssi - cfg.noise_floor_dbm).epsilon(1e-12));
        CHECK(ds.label(i) == oracle_sf(snr, cfg.snr_thresholds_db));
    }
}

TEST_CASE("labels equal the threshold rule applied to the SNR column even with noise") {
    SyntheticConfig cfg;
    cfg.n_rows = 2000;
    cfg.seed = 11;
    Dataset ds = generate_synthetic(cfg);
    const std::size_t snr_col = ds.column_index("SNR");
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        CHECK(ds.label(i) == oracle_sf(ds.value(i, snr_col), cfg.snr_thresholds_db));
    }
}

TEST_CASE("heights and frequencies come from the configured sets") {
    SyntheticConfig cfg;
    cfg.n_rows = 300;
    cfg.seed = 5;
    Dataset ds = generate_synthetic(cfg);
    const std::size_t height_col = ds.column_index("Height");
    const std::size_t freq_col = ds.column_index("Frequency");
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const double h = ds.value(i, height_col);
        const double f = ds.value(i, freq_col);
        CHECK(std::find(cfg.antenna_heights_m.begin(), cfg.antenna_heights_m.end(), h) !=
              cfg.antenna_heights_m.end());
        CHECK(std::find(cfg.carrier_frequencies_hz.begin(), cfg.carrier_frequencies_hz.end(), f) !=
              cfg.carrier_frequencies_hz.end());
    }
}

TEST_CASE("config validation rejects bad inputs") {
    SyntheticConfig cfg;
    cfg.n_rows = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = SyntheticConfig{};
    cfg.shadowing_sigma_db = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = SyntheticConfig{};
    cfg.snr_thresholds_db = {-7.5, -7.5, -12.5, -15.0, -17.5, -20.0};  // not strictly decreasing
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = SyntheticConfig{};
    cfg.distance_min_m = 500.0;
    cfg.distance_max_m = 100.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("synthetic config json round-trips") {
    SyntheticConfig cfg;
    cfg.n_rows = 123;
    cfg.seed = 9;
    cfg.shadowing_sigma_db = 1.25;
    SyntheticConfig back = SyntheticConfig::from_json(cfg.to_json());
    CHECK(back.n_rows == 123);
    CHECK(back.seed == 9);
    CHECK(back.shadowing_sigma_db == 1.25);
    CHECK(back.snr_thresholds_db == cfg.snr_thresholds_db);
}
