#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lorasf/dataset.hpp"

namespace lorasf {

/// Desk-scale LoRaWAN-like data generator. Rows follow a log-distance path
/// loss channel: RSSI = tx - (PL0 + 10*gamma*log10(d) + shadowing) plus a
/// small antenna-height gain, SNR = RSSI - noise floor + jitter, and the SF
/// label is the fastest SF whose demodulation floor the SNR still clears.
/// With shadowing and jitter at zero every column is closed-form in the
/// drawn (distance, height, frequency), which is what the oracle tests use.
struct SyntheticConfig {
    std::size_t n_rows = 10000;
    std::uint64_t seed = 42;

    double path_loss_exponent = 2.9;   // gamma
    double reference_loss_db = 40.0;   // PL0 at d0 = 1 m
    double shadowing_sigma_db = 2.0;   // sigma of the lognormal shadowing term
    double snr_jitter_db = 1.0;        // sigma of the SNR measurement jitter
    double tx_power_dbm = 14.0;
    double noise_floor_dbm = -117.0;

    double distance_min_m = 1000.0;
    double distance_max_m = 10000.0;
    bool log_uniform_distance = true;

    // Height gain relative to a 1 m reference antenna. Gives the height
    // feature a genuine (small) effect on RSSI so that feature-vs-label
    // correlations are not pure noise; set to 0 to disable.
    double height_gain_db_per_m = 1.0;

    std::vector<double> antenna_heights_m = {1.0, 1.5, 2.0, 3.0};
    std::vector<double> carrier_frequencies_hz = {868.1e6, 868.3e6, 868.5e6};

    // Demodulation floors for SF7..SF12, strictly decreasing.
    std::array<double, 6> snr_thresholds_db = {-7.5, -10.0, -12.5, -15.0, -17.5, -20.0};

    void validate() const;

    static SyntheticConfig from_json_file(const std::filesystem::path& path);
    static SyntheticConfig from_json(const std::string& text);
    std::string to_json() const;
};

/// Fastest SF whose threshold is still <= snr; SF12 when none is.
int sf_from_snr(double snr_db, const std::array<double, 6>& thresholds_db);

/// Deterministic given cfg.seed: same config, same bits.
Dataset generate_synthetic(const SyntheticConfig& cfg);

}  // namespace lorasf
