#include "lorasf/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lorasf/rng.hpp"

namespace lorasf {

void SyntheticConfig::validate() const {
    if (n_rows == 0) throw std::invalid_argument("synthetic config: n_rows must be > 0");
    if (shadowing_sigma_db < 0) throw std::invalid_argument("synthetic config: shadowing sigma must be >= 0");
    if (snr_jitter_db < 0) throw std::invalid_argument("synthetic config: snr jitter must be >= 0");
    if (!(path_loss_exponent > 0)) throw std::invalid_argument("synthetic config: path loss exponent must be > 0");
    if (!(distance_min_m > 0) || distance_max_m < distance_min_m) {
        throw std::invalid_argument("synthetic config: invalid distance range");
    }
    if (antenna_heights_m.empty()) throw std::invalid_argument("synthetic config: antenna height set is empty");
    if (carrier_frequencies_hz.empty()) throw std::invalid_argument("synthetic config: carrier frequency set is empty");
    for (std::size_t i = 1; i < snr_thresholds_db.size(); ++i) {
        if (!(snr_thresholds_db[i] < snr_thresholds_db[i - 1])) {
            throw std::invalid_argument(
                "synthetic config: SNR thresholds must be strictly decreasing from SF7 to SF12");
        }
    }
}

int sf_from_snr(double snr_db, const std::array<double, 6>& thresholds_db) {
    for (std::size_t i = 0; i < thresholds_db.size(); ++i) {
        if (thresholds_db[i] <= snr_db) return kSfMin + static_cast<int>(i);
    }
    return kSfMax;
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();

    Rng rng(cfg.seed);
    std::vector<std::string> column_names;
    for (FeatureId id : kAllFeatures) column_names.push_back(feature_name(id));

    std::vector<double> values;
    std::vector<int> labels;
    values.reserve(cfg.n_rows * kFeatureCount);
    labels.reserve(cfg.n_rows);

    const double log_min = std::log(cfg.distance_min_m);
    const double log_max = std::log(cfg.distance_max_m);

    for (std::size_t i = 0; i < cfg.n_rows; ++i) {
        // Fixed draw order per row: distance, height, frequency, shadowing,
        // jitter. Noise draws always advance the stream (scaled by sigma) so
        // toggling sigma to 0 changes values, never the draw sequence.
        const double u = rng.next_double();
        const double distance = cfg.log_uniform_distance
                                    ? std::exp(log_min + u * (log_max - log_min))
                                    : cfg.distance_min_m + u * (cfg.distance_max_m - cfg.distance_min_m);
        const double height = cfg.antenna_heights_m[rng.next_index(cfg.antenna_heights_m.size())];
        const double frequency =
            cfg.carrier_frequencies_hz[rng.next_index(cfg.carrier_frequencies_hz.size())];
        const double shadowing = rng.next_normal() * cfg.shadowing_sigma_db;
        const double jitter = rng.next_normal() * cfg.snr_jitter_db;

        const double path_loss = cfg.reference_loss_db +
                                 10.0 * cfg.path_loss_exponent * std::log10(distance) + shadowing;
        const double rssi =
            cfg.tx_power_dbm - path_loss + cfg.height_gain_db_per_m * (height - 1.0);
        const double snr = rssi - cfg.noise_floor_dbm + jitter;

        values.push_back(rssi);
        values.push_back(snr);
        values.push_back(frequency);
        values.push_back(height);
        values.push_back(distance);
        labels.push_back(sf_from_snr(snr, cfg.snr_thresholds_db));
    }

    return Dataset(std::move(column_names), std::move(values), std::move(labels));
}

namespace {

template <typename T>
void get_if_present(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

SyntheticConfig SyntheticConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SyntheticConfig cfg;
    get_if_present(j, "n_rows", cfg.n_rows);
    get_if_present(j, "seed", cfg.seed);
    get_if_present(j, "path_loss_exponent", cfg.path_loss_exponent);
    get_if_present(j, "reference_loss_db", cfg.reference_loss_db);
    get_if_present(j, "shadowing_sigma_db", cfg.shadowing_sigma_db);
    get_if_present(j, "snr_jitter_db", cfg.snr_jitter_db);
    get_if_present(j, "tx_power_dbm", cfg.tx_power_dbm);
    get_if_present(j, "noise_floor_dbm", cfg.noise_floor_dbm);
    get_if_present(j, "distance_min_m", cfg.distance_min_m);
    get_if_present(j, "distance_max_m", cfg.distance_max_m);
    get_if_present(j, "log_uniform_distance", cfg.log_uniform_distance);
    get_if_present(j, "height_gain_db_per_m", cfg.height_gain_db_per_m);
    get_if_present(j, "antenna_heights_m", cfg.antenna_heights_m);
    get_if_present(j, "carrier_frequencies_hz", cfg.carrier_frequencies_hz);
    if (auto it = j.find("snr_thresholds_db"); it != j.end()) {
        auto v = it->get<std::vector<double>>();
        if (v.size() != cfg.snr_thresholds_db.size()) {
            throw std::invalid_argument("synthetic config: snr_thresholds_db needs 6 entries (SF7..SF12)");
        }
        std::copy(v.begin(), v.end(), cfg.snr_thresholds_db.begin());
    }
    cfg.validate();
    return cfg;
}

SyntheticConfig SyntheticConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open synthetic config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string SyntheticConfig::to_json() const {
    nlohmann::json j = {
        {"n_rows", n_rows},
        {"seed", seed},
        {"path_loss_exponent", path_loss_exponent},
        {"reference_loss_db", reference_loss_db},
        {"shadowing_sigma_db", shadowing_sigma_db},
        {"snr_jitter_db", snr_jitter_db},
        {"tx_power_dbm", tx_power_dbm},
        {"noise_floor_dbm", noise_floor_dbm},
        {"distance_min_m", distance_min_m},
        {"distance_max_m", distance_max_m},
        {"log_uniform_distance", log_uniform_distance},
        {"height_gain_db_per_m", height_gain_db_per_m},
        {"antenna_heights_m", antenna_heights_m},
        {"carrier_frequencies_hz", carrier_frequencies_hz},
        {"snr_thresholds_db", snr_thresholds_db},
    };
    return j.dump(2);
}

}  // namespace lorasf
