#include "lorasf/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace lorasf {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;

// Splits one CSV line on commas. The input format is plain comma-delimited
// numeric data; quoted fields are not part of the contract.
void split_fields(const std::string& line, std::vector<std::string_view>& out) {
    out.clear();
    const char* begin = line.data();
    const char* end = begin + line.size();
    const char* field = begin;
    for (const char* p = begin; p != end; ++p) {
        if (*p == ',') {
            out.emplace_back(field, static_cast<std::size_t>(p - field));
            field = p + 1;
        }
    }
    out.emplace_back(field, static_cast<std::size_t>(end - field));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

ColumnMapping ColumnMapping::canonical() {
    return ColumnMapping{};
}

const std::string& ColumnMapping::header_for(FeatureId id) const {
    switch (id) {
        case FeatureId::Rssi: return rssi_dBm;
        case FeatureId::Snr: return snr_dB;
        case FeatureId::Frequency: return frequency_Hz;
        case FeatureId::Height: return antenna_height_ed_m;
        case FeatureId::Distance: return distance_m;
    }
    throw std::logic_error("invalid FeatureId");
}

void ColumnMapping::validate() const {
    const std::array<const std::string*, 6> names = {
        &rssi_dBm, &snr_dB, &frequency_Hz, &distance_m, &antenna_height_ed_m, &sf_label,
    };
    for (const std::string* n : names) {
        if (n->empty()) throw std::invalid_argument("column mapping contains an empty header name");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            if (*names[i] == *names[j]) {
                throw std::invalid_argument("column mapping binds two logical columns to '" +
                                            *names[i] + "'");
            }
        }
    }
}

ColumnMapping ColumnMapping::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ColumnMapping m;
    m.rssi_dBm = j.at("rssi_dBm").get<std::string>();
    m.snr_dB = j.at("snr_dB").get<std::string>();
    m.frequency_Hz = j.at("frequency_Hz").get<std::string>();
    m.distance_m = j.at("distance_m").get<std::string>();
    m.antenna_height_ed_m = j.at("antenna_height_ed_m").get<std::string>();
    m.sf_label = j.at("sf_label").get<std::string>();
    m.validate();
    return m;
}

ColumnMapping ColumnMapping::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open column mapping file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string ColumnMapping::to_json() const {
    nlohmann::json j = {
        {"rssi_dBm", rssi_dBm},
        {"snr_dB", snr_dB},
        {"frequency_Hz", frequency_Hz},
        {"distance_m", distance_m},
        {"antenna_height_ed_m", antenna_height_ed_m},
        {"sf_label", sf_label},
    };
    return j.dump(2);
}

Dataset::Dataset(std::vector<std::string> column_names, std::vector<double> values,
                 std::vector<int> labels)
    : column_names_(std::move(column_names)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
    if (column_names_.empty()) throw std::invalid_argument("dataset needs at least one column");
    if (values_.size() != labels_.size() * column_names_.size()) {
        throw std::invalid_argument("dataset value buffer does not match rows x cols");
    }
}

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < column_names_.size(); ++j) {
        if (column_names_[j] == name) return j;
    }
    throw std::out_of_range("dataset has no column named '" + name + "'");
}

bool Dataset::has_column(const std::string& name) const {
    return std::find(column_names_.begin(), column_names_.end(), name) != column_names_.end();
}

std::uint64_t Dataset::content_hash() const {
    std::uint64_t h = kFnvOffset;
    const std::uint64_t nr = rows();
    const std::uint64_t nc = cols();
    h = fnv1a(h, &nr, sizeof nr);
    h = fnv1a(h, &nc, sizeof nc);
    for (const std::string& name : column_names_) {
        h = fnv1a(h, name.data(), name.size());
        h = fnv1a(h, "\0", 1);
    }
    if (!values_.empty()) h = fnv1a(h, values_.data(), values_.size() * sizeof(double));
    if (!labels_.empty()) h = fnv1a(h, labels_.data(), labels_.size() * sizeof(int));
    return h;
}

std::string LoadStats::to_json() const {
    nlohmann::json j = {
        {"rows_accepted", rows_accepted},
        {"rejected_non_numeric", rejected_non_numeric},
        {"rejected_sf_out_of_range", rejected_sf_out_of_range},
        {"rejected_wrong_field_count", rejected_wrong_field_count},
    };
    return j.dump(2);
}

std::string CleanStats::to_json() const {
    nlohmann::json j = {
        {"dropped_nan", dropped_nan},
        {"dropped_inf", dropped_inf},
    };
    return j.dump(2);
}

Dataset load_csv(const std::filesystem::path& path, const ColumnMapping& mapping,
                 LoadStats* stats) {
    mapping.validate();

    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("dataset file is empty (no header row): " + path.string());
    }
    // Strip a UTF-8 BOM if present.
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    std::vector<std::string_view> fields;
    split_fields(line, fields);
    std::vector<std::string> header;
    header.reserve(fields.size());
    for (std::string_view f : fields) header.emplace_back(trim(f));

    auto find_header = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return j;
        }
        throw std::runtime_error("mapped column '" + name + "' not found in CSV header of " +
                                 path.string());
    };

    std::array<std::size_t, kFeatureCount> feature_col{};
    for (FeatureId id : kAllFeatures) {
        feature_col[static_cast<std::size_t>(id)] = find_header(mapping.header_for(id));
    }
    const std::size_t sf_col = find_header(mapping.sf_label);
    const std::size_t n_fields = header.size();

    std::vector<std::string> column_names;
    column_names.reserve(kFeatureCount);
    for (FeatureId id : kAllFeatures) column_names.push_back(feature_name(id));

    LoadStats local;
    std::vector<double> values;
    std::vector<int> labels;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_fields(line, fields);
        if (fields.size() != n_fields) {
            ++local.rejected_wrong_field_count;
            continue;
        }

        std::array<double, kFeatureCount> row{};
        bool numeric_ok = true;
        for (std::size_t f = 0; f < kFeatureCount && numeric_ok; ++f) {
            numeric_ok = parse_double(fields[feature_col[f]], row[f]);
        }
        double sf_raw = 0.0;
        if (!numeric_ok || !parse_double(fields[sf_col], sf_raw)) {
            ++local.rejected_non_numeric;
            continue;
        }
        // SF must be an integer class in the closed set {7..12}; anything
        // else is rejected rather than clamped.
        const double sf_rounded = std::nearbyint(sf_raw);
        if (sf_rounded != sf_raw || sf_raw < kSfMin || sf_raw > kSfMax) {
            ++local.rejected_sf_out_of_range;
            continue;
        }

        values.insert(values.end(), row.begin(), row.end());
        labels.push_back(static_cast<int>(sf_rounded));
        ++local.rows_accepted;
    }

    if (stats) *stats = local;
    return Dataset(std::move(column_names), std::move(values), std::move(labels));
}

void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& sf_column_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());

    for (const std::string& name : ds.column_names()) out << name << ',';
    out << sf_column_name << '\n';

    char buf[64];
    const std::size_t p = ds.cols();
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        std::span<const double> row = ds.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row[j]);
            if (ec != std::errc{}) throw std::runtime_error("float formatting failed");
            out.write(buf, ptr - buf);
            out.put(',');
        }
        out << ds.label(i) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Dataset clean(const Dataset& ds, CleanStats* stats) {
    CleanStats local;
    std::vector<double> values;
    std::vector<int> labels;
    values.reserve(ds.values().size());
    labels.reserve(ds.rows());

    const std::size_t p = ds.cols();
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        std::span<const double> row = ds.row(i);
        bool has_nan = false;
        bool has_inf = false;
        for (std::size_t j = 0; j < p; ++j) {
            if (std::isnan(row[j])) has_nan = true;
            else if (std::isinf(row[j])) has_inf = true;
        }
        if (has_nan) {
            ++local.dropped_nan;  // NaN takes precedence when both occur
        } else if (has_inf) {
            ++local.dropped_inf;
        } else {
            values.insert(values.end(), row.begin(), row.end());
            labels.push_back(ds.label(i));
        }
    }

    if (stats) *stats = local;
    if (labels.empty()) throw std::runtime_error("dataset empty after cleaning");
    return Dataset(ds.column_names(), std::move(values), std::move(labels));
}

Dataset select_features(const Dataset& ds, const FeatureSet& fs) {
    const std::vector<FeatureId> members = fs.members();
    if (members.empty()) throw std::invalid_argument("feature set is empty");

    std::vector<std::size_t> src_cols;
    std::vector<std::string> names;
    src_cols.reserve(members.size());
    names.reserve(members.size());
    for (FeatureId id : members) {
        const std::string& name = feature_name(id);
        src_cols.push_back(ds.column_index(name));  // throws naming the feature
        names.push_back(name);
    }

    std::vector<double> values;
    values.reserve(ds.rows() * src_cols.size());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        std::span<const double> row = ds.row(i);
        for (std::size_t c : src_cols) values.push_back(row[c]);
    }
    return Dataset(std::move(names), std::move(values), ds.labels());
}

}  // namespace lorasf
