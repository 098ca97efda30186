#include "lorasf/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lorasf/features.hpp"

namespace lorasf {

namespace {

std::string shortest_repr(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("float formatting failed");
    return std::string(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct TableSpec {
    const char* file_stem;
    const char* title;
    const char* feature_header;
    int first_serial;
    int last_serial;
};

constexpr TableSpec kTables[5] = {
    {"table1_singles", "Performance metrics for single features", "Feature", 1, 5},
    {"table2_pairs", "Performance metrics for two-feature combinations", "Features", 6, 15},
    {"table3_triples", "Performance metrics for three-feature combinations", "Features", 16, 25},
    {"table4_quads", "Performance metrics for four-feature combinations", "Features", 26, 30},
    {"table5_full", "Performance metrics for the five-feature combination", "Features", 31, 31},
};

// Report column order; fixed independently of the ModelKind enum.
constexpr std::array<ModelKind, 4> kColumnOrder = {ModelKind::Knn, ModelKind::Mlr, ModelKind::Dtc,
                                                   ModelKind::Rf};

struct SerialRow {
    std::string label;
    std::array<const EvalRun*, 4> by_kind{};  // indexed by ModelKind
    const SerialAverage* average = nullptr;

    bool complete() const {
        if (!average) return false;
        for (const EvalRun* r : by_kind) {
            if (!r) return false;
        }
        return true;
    }
};

std::map<int, SerialRow> index_runs(const SweepReport& report) {
    std::map<int, SerialRow> rows;
    for (const EvalRun& run : report.runs) {
        if (run.failed) continue;
        SerialRow& row = rows[run.serial];
        row.label = run.label;
        row.by_kind[static_cast<std::size_t>(run.kind)] = &run;
    }
    for (const SerialAverage& avg : report.averages) {
        if (auto it = rows.find(avg.serial); it != rows.end()) it->second.average = &avg;
    }
    return rows;
}

}  // namespace

std::string format_pct(double unit_value) {
    // Shortest fixed-notation representation that round-trips.
    char buf[512];
    auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, unit_value * 100.0, std::chars_format::fixed);
    if (ec != std::errc{}) throw std::runtime_error("float formatting failed");
    const std::string repr(buf, ptr);

    bool negative = false;
    std::string digits;  // integer digits + optional fraction, no dot
    std::size_t dot_pos = std::string::npos;
    for (char c : repr) {
        if (c == '-') {
            negative = true;
        } else if (c == '.') {
            dot_pos = digits.size();
        } else if (c == 'e' || c == 'E') {
            throw std::invalid_argument("format_pct: unexpected notation: " + repr);
        } else {
            digits.push_back(c);
        }
    }
    if (dot_pos == std::string::npos) dot_pos = digits.size();

    // Keep two fractional digits, rounding half-up in decimal space.
    std::string frac = digits.substr(dot_pos);
    std::string intpart = digits.substr(0, dot_pos);
    while (frac.size() < 3) frac.push_back('0');
    bool round_up = frac[2] >= '5';
    frac.resize(2);
    if (round_up) {
        std::string all = intpart + frac;
        int i = static_cast<int>(all.size()) - 1;
        while (i >= 0) {
            if (all[static_cast<std::size_t>(i)] == '9') {
                all[static_cast<std::size_t>(i)] = '0';
                --i;
            } else {
                ++all[static_cast<std::size_t>(i)];
                break;
            }
        }
        if (i < 0) all.insert(all.begin(), '1');
        intpart = all.substr(0, all.size() - 2);
        frac = all.substr(all.size() - 2);
    }
    if (intpart.empty()) intpart = "0";
    return (negative ? "-" : "") + intpart + "." + frac;
}

void emit_tables(const SweepReport& report, const std::filesystem::path& out_dir, bool strict) {
    const std::map<int, SerialRow> rows = index_runs(report);

    if (strict) {
        for (int serial = 1; serial <= 31; ++serial) {
            auto it = rows.find(serial);
            if (it == rows.end() || !it->second.complete()) {
                throw std::runtime_error("emit_tables: sweep is incomplete at serial " +
                                         std::to_string(serial) +
                                         " (use partial mode for incomplete sweeps)");
            }
        }
    }

    const std::filesystem::path table_dir = out_dir / "tables";
    std::filesystem::create_directories(table_dir);

    for (const TableSpec& spec : kTables) {
        // Best row by average accuracy (full precision), ties to the lower
        // serial; bolded in the Markdown rendering.
        int best_serial = -1;
        double best_avg = -1.0;
        for (int serial = spec.first_serial; serial <= spec.last_serial; ++serial) {
            auto it = rows.find(serial);
            if (it == rows.end() || !it->second.complete()) continue;
            if (it->second.average->avg_accuracy > best_avg) {
                best_avg = it->second.average->avg_accuracy;
                best_serial = serial;
            }
        }

        std::ostringstream md;
        std::ostringstream csv;
        md << "# " << spec.title << "\n\n";
        md << "| No. | " << spec.feature_header;
        for (ModelKind kind : kColumnOrder) {
            md << " | " << model_kind_name(kind) << " Acc % | " << model_kind_name(kind) << " F1 %";
        }
        md << " | Average Acc % | Average F1 % |\n";
        md << "|----:|:---";
        for (int i = 0; i < 10; ++i) md << "|---:";
        md << "|\n";

        csv << "serial,label";
        for (ModelKind kind : kColumnOrder) {
            const std::string& name = model_kind_name(kind);
            csv << ',' << name << "_acc_pct," << name << "_f1_pct";
        }
        csv << ",avg_acc_pct,avg_f1_pct\n";

        for (int serial = spec.first_serial; serial <= spec.last_serial; ++serial) {
            auto it = rows.find(serial);
            if (it == rows.end() || !it->second.complete()) continue;
            const SerialRow& row = it->second;

            const bool bold = serial == best_serial;
            md << "| " << serial << " | ";
            md << (bold ? "**" + row.label + "**" : row.label);
            csv << serial << ',' << row.label;
            for (ModelKind kind : kColumnOrder) {
                const EvalRun* run = row.by_kind[static_cast<std::size_t>(kind)];
                const std::string acc = format_pct(run->accuracy);
                const std::string f1 = format_pct(run->weighted_f1);
                md << " | " << (bold ? "**" + acc + "**" : acc) << " | "
                   << (bold ? "**" + f1 + "**" : f1);
                csv << ',' << acc << ',' << f1;
            }
            const std::string avg_acc = format_pct(row.average->avg_accuracy);
            const std::string avg_f1 = format_pct(row.average->avg_weighted_f1);
            md << " | " << (bold ? "**" + avg_acc + "**" : avg_acc) << " | "
               << (bold ? "**" + avg_f1 + "**" : avg_f1) << " |\n";
            csv << ',' << avg_acc << ',' << avg_f1 << '\n';
        }

        write_file(table_dir / (std::string(spec.file_stem) + ".md"), md.str());
        write_file(table_dir / (std::string(spec.file_stem) + ".csv"), csv.str());
    }
}

namespace {

// Minimal SVG line chart: serial on x, percentage on y.
std::string fig2_svg(const std::vector<SerialAverage>& averages) {
    constexpr double kWidth = 860.0;
    constexpr double kHeight = 520.0;
    constexpr double kLeft = 60.0;
    constexpr double kRight = 830.0;
    constexpr double kTop = 40.0;
    constexpr double kBottom = 470.0;

    auto x_of = [&](int serial) {
        return kLeft + (kRight - kLeft) * (serial - 1) / 30.0;
    };
    auto y_of = [&](double pct) {
        return kBottom - (kBottom - kTop) * pct / 100.0;
    };

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int pct = 0; pct <= 100; pct += 10) {
        const double y = y_of(pct);
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kRight << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << pct
            << "</text>\n";
    }
    for (int serial = 1; serial <= 31; serial += 2) {
        svg << "<text x=\"" << x_of(serial) << "\" y=\"" << kBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << serial
            << "</text>\n";
    }

    const std::array<std::pair<const char*, double SerialAverage::*>, 2> series = {{
        {"#1f77b4", &SerialAverage::avg_accuracy},
        {"#d62728", &SerialAverage::avg_weighted_f1},
    }};
    for (const auto& [color, member] : series) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const SerialAverage& a : averages) {
            svg << x_of(a.serial) << ',' << y_of((a.*member) * 100.0) << ' ';
        }
        svg << "\"/>\n";
        for (const SerialAverage& a : averages) {
            svg << "<circle cx=\"" << x_of(a.serial) << "\" cy=\"" << y_of((a.*member) * 100.0)
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
    }
    svg << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"13\" font-family=\"sans-serif\">"
        << "Average accuracy % (blue) and weighted F1 % (red) per feature combination"
        << "</text>\n";
    svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << "feature combination serial</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string fig3_svg(const CorrelationReport& ranking) {
    constexpr double kWidth = 640.0;
    constexpr double kHeight = 420.0;
    constexpr double kLeft = 60.0;
    constexpr double kBottom = 360.0;
    constexpr double kTop = 40.0;
    constexpr double kBarWidth = 80.0;
    constexpr double kGap = 30.0;

    std::vector<const FeatureCorrelation*> by_rank;
    for (int rank = 1; rank <= static_cast<int>(ranking.entries.size()); ++rank) {
        by_rank.push_back(&ranking.by_rank(rank));
    }

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int tick = 0; tick <= 10; ++tick) {
        const double frac = tick / 10.0;
        const double y = kBottom - (kBottom - kTop) * frac;
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kWidth - 20 << "\" y2=\""
            << y << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << frac
            << "</text>\n";
    }
    for (std::size_t i = 0; i < by_rank.size(); ++i) {
        const FeatureCorrelation& e = *by_rank[i];
        const double x = kLeft + 20 + static_cast<double>(i) * (kBarWidth + kGap);
        const double h = (kBottom - kTop) * std::min(1.0, e.abs_r);
        svg << "<rect x=\"" << x << "\" y=\"" << kBottom - h << "\" width=\"" << kBarWidth
            << "\" height=\"" << h << "\" fill=\"#1f77b4\"/>\n";
        svg << "<text x=\"" << x + kBarWidth / 2 << "\" y=\"" << kBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
            << feature_name(e.feature) << "</text>\n";
        svg << "<text x=\"" << x + kBarWidth / 2 << "\" y=\"" << kBottom - h - 6
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << e.abs_r
            << "</text>\n";
    }
    svg << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"13\" font-family=\"sans-serif\">"
        << "Feature ranking by |Pearson r| against SF</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

void emit_figure_data(const SweepReport& report, const std::filesystem::path& out_dir, bool svg) {
    std::vector<SerialAverage> averages = report.averages;
    std::sort(averages.begin(), averages.end(),
              [](const SerialAverage& a, const SerialAverage& b) { return a.serial < b.serial; });

    const std::filesystem::path fig_dir = out_dir / "figures";
    std::filesystem::create_directories(fig_dir);

    const ComboCatalog& catalog = enumerate_combinations();
    std::ostringstream csv;
    csv << "serial,label,avg_accuracy_pct,avg_f1_pct\n";
    for (const SerialAverage& a : averages) {
        csv << a.serial << ',' << catalog.by_serial(a.serial).label << ','
            << format_pct(a.avg_accuracy) << ',' << format_pct(a.avg_weighted_f1) << '\n';
    }
    write_file(fig_dir / "fig2.csv", csv.str());
    if (svg) write_file(fig_dir / "fig2.svg", fig2_svg(averages));
}

void emit_ranking(const CorrelationReport& ranking, const std::filesystem::path& out_dir,
                  bool svg) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path fig_dir = out_dir / "figures";
    std::filesystem::create_directories(fig_dir);

    std::ostringstream csv;
    csv << "feature,r,abs_r,rank,degenerate\n";
    for (const FeatureCorrelation& e : ranking.entries) {
        csv << feature_name(e.feature) << ',' << shortest_repr(e.r) << ',' << shortest_repr(e.abs_r)
            << ',' << e.rank << ',' << (e.degenerate ? 1 : 0) << '\n';
    }
    write_file(out_dir / "ranking.csv", csv.str());

    std::ostringstream fig_csv;
    fig_csv << "rank,feature,abs_r\n";
    for (int rank = 1; rank <= static_cast<int>(ranking.entries.size()); ++rank) {
        const FeatureCorrelation& e = ranking.by_rank(rank);
        fig_csv << rank << ',' << feature_name(e.feature) << ',' << shortest_repr(e.abs_r) << '\n';
    }
    write_file(fig_dir / "fig3.csv", fig_csv.str());
    if (svg) write_file(fig_dir / "fig3.svg", fig3_svg(ranking));
}

void write_metadata(const SweepReport& report, const std::string& effective_config_json,
                    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    nlohmann::json j = {
        {"software_version", report.metadata.software_version},
        {"dataset_hash", report.metadata.dataset_hash},
        {"base_seed", report.metadata.base_seed},
        {"split",
         {{"train_fraction", report.metadata.split.train_fraction},
          {"seed", report.metadata.split.seed},
          {"stratified", report.metadata.split.stratified}}},
        {"standardize", report.metadata.standardize},
        {"hyperparams", nlohmann::json::parse(report.metadata.hyperparams_json)},
        {"serials", report.metadata.serials},
        {"kinds", report.metadata.kinds},
    };
    j["effective_config"] = effective_config_json.empty()
                                ? nlohmann::json(nullptr)
                                : nlohmann::json::parse(effective_config_json);
    write_file(out_dir / "metadata.json", j.dump(2) + "\n");
}

void write_catalog_json(const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "catalog.json", enumerate_combinations().to_json() + "\n");
}

}  // namespace lorasf
