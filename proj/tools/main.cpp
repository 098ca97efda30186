// lorasf: spreading-factor prediction feature study for LoRaWAN datasets.
//
// Subcommands: ingest, synth, sweep, rank, report. A JSON config file
// provides the knobs; command-line flags override it. Progress goes to
// stderr, result data to files; stdout is reserved for --json summaries.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lorasf/dataset.hpp"
#include "lorasf/features.hpp"
#include "lorasf/metrics.hpp"
#include "lorasf/report.hpp"
#include "lorasf/sweep.hpp"
#include "lorasf/synthetic.hpp"
#include "lorasf/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_cancel{false};

void handle_sigint(int) {
    g_cancel.store(true);
}

struct RunConfig {
    std::optional<std::string> dataset_csv;
    std::optional<std::string> mapping_path;
    std::optional<lorasf::SyntheticConfig> synthetic;
    lorasf::Hyperparams hyperparams;
    lorasf::SplitSpec split;
    std::vector<int> serials;
    std::vector<lorasf::ModelKind> kinds;
    std::uint64_t base_seed = 42;
    int workers = 1;
    std::string out_dir = "out";
    std::string log_level = "info";

    void validate_source() const {
        if (dataset_csv.has_value() == synthetic.has_value()) {
            throw std::runtime_error(
                "exactly one data source must be set: a dataset CSV or a synthetic config");
        }
    }

    json to_json() const {
        json j;
        if (dataset_csv) {
            j["dataset"] = {{"csv", *dataset_csv},
                            {"mapping", mapping_path ? json(*mapping_path) : json(nullptr)}};
        } else {
            j["dataset"] = nullptr;
        }
        j["synthetic"] = synthetic ? json::parse(synthetic->to_json()) : json(nullptr);
        j["hyperparams"] = json::parse(hyperparams.to_json());
        j["split"] = {{"train_fraction", split.train_fraction},
                      {"seed", split.seed},
                      {"stratified", split.stratified}};
        j["serials"] = serials;
        json kinds_json = json::array();
        for (lorasf::ModelKind k : kinds) kinds_json.push_back(lorasf::model_kind_name(k));
        j["kinds"] = kinds_json;
        j["base_seed"] = base_seed;
        j["workers"] = workers;
        j["out_dir"] = out_dir;
        j["log_level"] = log_level;
        return j;
    }
};

// Flag values; only set when the user passed the flag, so they can override
// config-file values.
struct FlagOverrides {
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    bool standardize = false;
    std::optional<std::string> serials;
    std::optional<std::string> kinds;
    std::optional<double> train_fraction;
    bool stratified = false;
    bool keep_going = false;
    bool resume = false;
    bool json_output = false;

    std::optional<std::string> data_csv;
    std::optional<std::string> mapping;
    std::optional<std::string> synth_config;
    std::optional<std::size_t> rows;
    std::optional<std::size_t> knn_max_train_rows;
    std::optional<std::string> out_file;
    std::optional<std::string> sweep_path;
    bool partial = false;
    bool no_svg = false;
};

std::vector<int> parse_serials(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int lo = std::stoi(item.substr(0, dash));
            const int hi = std::stoi(item.substr(dash + 1));
            if (hi < lo) throw std::runtime_error("bad serial range: " + item);
            for (int s = lo; s <= hi; ++s) out.push_back(s);
        } else {
            out.push_back(std::stoi(item));
        }
    }
    if (out.empty()) throw std::runtime_error("empty --serials list");
    return out;
}

std::vector<lorasf::ModelKind> parse_kinds(const std::string& text) {
    std::vector<lorasf::ModelKind> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(lorasf::parse_model_kind(item));
    }
    if (out.empty()) throw std::runtime_error("empty --kinds list");
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig load_config(const FlagOverrides& flags) {
    RunConfig cfg;
    cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    if (flags.config_path) {
        const json j = json::parse(read_file(*flags.config_path));
        if (j.contains("dataset") && !j["dataset"].is_null()) {
            cfg.dataset_csv = j["dataset"].at("csv").get<std::string>();
            if (j["dataset"].contains("mapping") && !j["dataset"]["mapping"].is_null()) {
                cfg.mapping_path = j["dataset"]["mapping"].get<std::string>();
            }
        }
        if (j.contains("synthetic") && !j["synthetic"].is_null()) {
            if (j["synthetic"].is_string()) {
                cfg.synthetic =
                    lorasf::SyntheticConfig::from_json_file(j["synthetic"].get<std::string>());
            } else {
                cfg.synthetic = lorasf::SyntheticConfig::from_json(j["synthetic"].dump());
            }
        }
        if (j.contains("hyperparams")) {
            cfg.hyperparams = lorasf::Hyperparams::from_json(j["hyperparams"].dump());
        }
        if (j.contains("split")) {
            const json& s = j["split"];
            if (s.contains("train_fraction")) cfg.split.train_fraction = s["train_fraction"];
            if (s.contains("seed")) cfg.split.seed = s["seed"];
            if (s.contains("stratified")) cfg.split.stratified = s["stratified"];
        }
        if (j.contains("serials")) cfg.serials = j["serials"].get<std::vector<int>>();
        if (j.contains("kinds")) {
            for (const auto& k : j["kinds"]) {
                cfg.kinds.push_back(lorasf::parse_model_kind(k.get<std::string>()));
            }
        }
        if (j.contains("base_seed")) cfg.base_seed = j["base_seed"];
        if (j.contains("workers")) cfg.workers = j["workers"];
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"];
        if (j.contains("log_level")) cfg.log_level = j["log_level"];
        if (j.contains("standardize")) cfg.hyperparams.standardize = j["standardize"];
    }

    // Flags beat config-file values.
    if (flags.data_csv) {
        cfg.dataset_csv = flags.data_csv;
        cfg.synthetic.reset();
    }
    if (flags.mapping) cfg.mapping_path = flags.mapping;
    if (flags.synth_config) {
        cfg.synthetic = lorasf::SyntheticConfig::from_json_file(*flags.synth_config);
        cfg.dataset_csv.reset();
    }
    if (flags.rows && cfg.synthetic) cfg.synthetic->n_rows = *flags.rows;
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    if (flags.workers) cfg.workers = *flags.workers;
    if (flags.seed) {
        cfg.base_seed = *flags.seed;
        cfg.split.seed = *flags.seed;
        if (cfg.synthetic) cfg.synthetic->seed = *flags.seed;
    }
    if (flags.standardize) cfg.hyperparams.standardize = true;
    if (flags.serials) cfg.serials = parse_serials(*flags.serials);
    if (flags.kinds) cfg.kinds = parse_kinds(*flags.kinds);
    if (flags.train_fraction) cfg.split.train_fraction = *flags.train_fraction;
    if (flags.stratified) cfg.split.stratified = true;
    if (flags.knn_max_train_rows) cfg.hyperparams.knn_max_train_rows = *flags.knn_max_train_rows;

    cfg.hyperparams.validate();
    cfg.split.validate();
    return cfg;
}

bool verbose(const RunConfig& cfg) {
    return cfg.log_level != "quiet";
}

// Loads + cleans the configured source. Synthetic data is generated clean
// by construction but goes through clean() anyway for uniform stats.
lorasf::Dataset load_source(const RunConfig& cfg, lorasf::LoadStats* load_stats,
                            lorasf::CleanStats* clean_stats) {
    cfg.validate_source();
    lorasf::Dataset raw;
    if (cfg.dataset_csv) {
        lorasf::ColumnMapping mapping = cfg.mapping_path
                                            ? lorasf::ColumnMapping::from_json_file(*cfg.mapping_path)
                                            : lorasf::ColumnMapping::canonical();
        raw = lorasf::load_csv(*cfg.dataset_csv, mapping, load_stats);
    } else {
        raw = lorasf::generate_synthetic(*cfg.synthetic);
        if (load_stats) *load_stats = lorasf::LoadStats{raw.rows(), 0, 0, 0};
    }
    if (raw.empty()) {
        if (clean_stats) *clean_stats = lorasf::CleanStats{};
        return raw;
    }
    return lorasf::clean(raw, clean_stats);
}

std::map<int, std::size_t> label_histogram(const lorasf::Dataset& ds) {
    std::map<int, std::size_t> hist;
    for (int label : ds.labels()) ++hist[label];
    return hist;
}

int cmd_ingest(const RunConfig& cfg, const FlagOverrides& flags) {
    lorasf::LoadStats load_stats;
    lorasf::CleanStats clean_stats;
    const lorasf::Dataset ds = load_source(cfg, &load_stats, &clean_stats);

    const auto hist = label_histogram(ds);
    if (verbose(cfg)) {
        std::cerr << "rows: " << ds.rows() << " (rejected: " << load_stats.rejected_total()
                  << ", dropped in clean: " << clean_stats.dropped_total() << ")\n";
        std::cerr << "columns:";
        for (const auto& name : ds.column_names()) std::cerr << ' ' << name;
        std::cerr << "\nlabel histogram:\n";
        for (const auto& [label, count] : hist) {
            std::cerr << "  SF" << label << ": " << count << '\n';
        }
    }

    if (flags.json_output) {
        json hist_json = json::object();
        for (const auto& [label, count] : hist) hist_json[std::to_string(label)] = count;
        json j = {
            {"rows", ds.rows()},
            {"columns", ds.column_names()},
            {"dataset_hash", ds.content_hash()},
            {"load_stats", json::parse(load_stats.to_json())},
            {"clean_stats", json::parse(clean_stats.to_json())},
            {"label_histogram", hist_json},
        };
        std::cout << j.dump(2) << '\n';
    }

    if (ds.empty()) {
        std::cerr << "warning: dataset has no usable rows\n";
        return 3;
    }
    return 0;
}

int cmd_synth(const RunConfig& cfg, const FlagOverrides& flags) {
    if (!cfg.synthetic) throw std::runtime_error("synth needs a synthetic config (--synth-config)");
    const lorasf::Dataset ds = lorasf::generate_synthetic(*cfg.synthetic);

    fs::path out_path;
    if (flags.out_file) {
        out_path = *flags.out_file;
    } else {
        fs::create_directories(cfg.out_dir);
        out_path = fs::path(cfg.out_dir) / "synthetic.csv";
    }
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    lorasf::write_csv(ds, out_path);

    if (verbose(cfg)) {
        std::cerr << "wrote " << ds.rows() << " rows to " << out_path.string() << '\n';
    }
    if (flags.json_output) {
        json j = {{"path", out_path.string()},
                  {"rows", ds.rows()},
                  {"dataset_hash", ds.content_hash()}};
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const FlagOverrides& flags) {
    lorasf::Dataset ds = load_source(cfg, nullptr, nullptr);
    if (ds.empty()) throw std::runtime_error("dataset has no usable rows");

    lorasf::SweepPlan plan;
    plan.serials = cfg.serials;
    plan.kinds = cfg.kinds;
    plan.hyperparams = cfg.hyperparams;
    plan.split = cfg.split;
    plan.base_seed = cfg.base_seed;
    plan.workers = cfg.workers;
    plan.keep_going = flags.keep_going;

    fs::create_directories(cfg.out_dir);
    const fs::path report_path = fs::path(cfg.out_dir) / "sweep.json";

    std::optional<lorasf::SweepReport> prior;
    if (flags.resume && fs::exists(report_path)) {
        prior = lorasf::SweepReport::from_json(read_file(report_path));
        if (verbose(cfg)) {
            std::cerr << "resuming from " << report_path.string() << " (" << prior->runs.size()
                      << " prior runs)\n";
        }
    }

    lorasf::SweepProgress progress;
    if (verbose(cfg)) {
        progress = [](const lorasf::EvalRun& run, std::size_t done, std::size_t total) {
            std::cerr << '[' << done << '/' << total << "] serial " << run.serial << ' '
                      << lorasf::model_kind_name(run.kind);
            if (run.failed) {
                std::cerr << " FAILED: " << run.error << '\n';
            } else {
                std::fprintf(stderr, " acc=%.4f f1=%.4f (%.2fs)\n", run.accuracy, run.weighted_f1,
                             run.seconds);
            }
        };
    }

    const lorasf::SweepReport report =
        lorasf::run_sweep(ds, plan, prior ? &*prior : nullptr, progress, &g_cancel);

    std::ofstream out(report_path, std::ios::binary);
    out << report.to_json(true) << '\n';
    out.close();
    std::ofstream csv(fs::path(cfg.out_dir) / "runs.csv", std::ios::binary);
    csv << report.to_csv();
    csv.close();
    lorasf::write_metadata(report, cfg.to_json().dump(), cfg.out_dir);

    std::size_t failed = 0;
    for (const auto& run : report.runs) failed += run.failed ? 1 : 0;

    if (flags.json_output) {
        json j = {
            {"runs", report.runs.size()},
            {"failed", failed},
            {"cancelled", g_cancel.load()},
            {"report", report_path.string()},
        };
        std::cout << j.dump(2) << '\n';
    }
    if (verbose(cfg)) {
        std::cerr << "sweep: " << report.runs.size() - failed << "/" << report.runs.size()
                  << " runs ok, report at " << report_path.string() << '\n';
    }
    if (g_cancel.load()) return 130;
    return failed == 0 ? 0 : 1;
}

int cmd_rank(const RunConfig& cfg, const FlagOverrides& flags) {
    lorasf::Dataset ds = load_source(cfg, nullptr, nullptr);
    if (ds.empty()) throw std::runtime_error("dataset has no usable rows");

    const lorasf::CorrelationReport ranking = lorasf::rank_features(ds);
    lorasf::emit_ranking(ranking, cfg.out_dir, !flags.no_svg);

    if (verbose(cfg)) {
        for (int rank = 1; rank <= static_cast<int>(ranking.entries.size()); ++rank) {
            const auto& e = ranking.by_rank(rank);
            std::fprintf(stderr, "%d. %-10s r=%+.4f%s\n", rank,
                         lorasf::feature_name(e.feature).c_str(), e.r,
                         e.degenerate ? " (degenerate)" : "");
        }
    }
    if (flags.json_output) std::cout << ranking.to_json() << '\n';
    return 0;
}

int cmd_report(const RunConfig& cfg, const FlagOverrides& flags) {
    const fs::path sweep_path = flags.sweep_path ? fs::path(*flags.sweep_path)
                                                 : fs::path(cfg.out_dir) / "sweep.json";
    const lorasf::SweepReport report = lorasf::SweepReport::from_json(read_file(sweep_path));

    lorasf::emit_tables(report, cfg.out_dir, !flags.partial);
    lorasf::emit_figure_data(report, cfg.out_dir, !flags.no_svg);
    lorasf::write_metadata(report, cfg.to_json().dump(), cfg.out_dir);
    lorasf::write_catalog_json(cfg.out_dir);

    if (verbose(cfg)) {
        std::cerr << "report written under " << cfg.out_dir << " (tables/, figures/)\n";
    }
    if (flags.json_output) {
        json j = {{"out_dir", cfg.out_dir}, {"runs", report.runs.size()}};
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LoRaWAN spreading-factor feature study"};
    app.set_version_flag("--version", lorasf::kVersion);
    app.require_subcommand(1);

    FlagOverrides flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "JSON run configuration file");
        sub->add_option("--out", flags.out_dir, "output directory");
        sub->add_option("--workers", flags.workers, "worker thread count");
        sub->add_option("--seed", flags.seed, "base seed (also sets the split seed)");
        sub->add_flag("--standardize", flags.standardize, "z-score features (fit on train)");
        sub->add_option("--serials", flags.serials, "combination serials, e.g. 6,16-18,31");
        sub->add_option("--kinds", flags.kinds, "model kinds, e.g. knn,dtc,mlr,rf");
        sub->add_option("--train-fraction", flags.train_fraction, "train split fraction (0,1)");
        sub->add_flag("--stratified", flags.stratified, "stratify the split per class");
        sub->add_flag("--keep-going", flags.keep_going, "record run failures and continue");
        sub->add_flag("--resume", flags.resume, "reuse completed runs from a prior sweep.json");
        sub->add_flag("--json", flags.json_output, "print a JSON summary to stdout");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "load, clean and summarize a dataset");
    ingest->add_option("--data", flags.data_csv, "dataset CSV path");
    ingest->add_option("--mapping", flags.mapping, "column mapping JSON");
    add_common(ingest);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    synth->add_option("--synth-config", flags.synth_config, "synthetic generator config JSON");
    synth->add_option("--rows", flags.rows, "row count override");
    synth->add_option("--out-file", flags.out_file, "output CSV path");
    add_common(synth);

    CLI::App* sweep = app.add_subcommand("sweep", "run the feature-combination sweep");
    sweep->add_option("--data", flags.data_csv, "dataset CSV path");
    sweep->add_option("--mapping", flags.mapping, "column mapping JSON");
    sweep->add_option("--synth-config", flags.synth_config, "synthetic generator config JSON");
    sweep->add_option("--knn-max-train-rows", flags.knn_max_train_rows,
                      "subsample the k-NN training matrix to at most this many rows (0 = all)");
    add_common(sweep);

    CLI::App* rank = app.add_subcommand("rank", "Pearson feature ranking against SF");
    rank->add_option("--data", flags.data_csv, "dataset CSV path");
    rank->add_option("--mapping", flags.mapping, "column mapping JSON");
    rank->add_option("--synth-config", flags.synth_config, "synthetic generator config JSON");
    rank->add_flag("--no-svg", flags.no_svg, "skip SVG rendering");
    add_common(rank);

    CLI::App* report = app.add_subcommand("report", "render tables and figures from a sweep");
    report->add_option("--sweep", flags.sweep_path, "sweep.json path (default <out>/sweep.json)");
    report->add_flag("--partial", flags.partial, "allow incomplete sweeps");
    report->add_flag("--no-svg", flags.no_svg, "skip SVG rendering");
    add_common(report);

    CLI11_PARSE(app, argc, argv);

    std::signal(SIGINT, handle_sigint);

    try {
        const RunConfig cfg = load_config(flags);
        if (ingest->parsed()) return cmd_ingest(cfg, flags);
        if (synth->parsed()) return cmd_synth(cfg, flags);
        if (sweep->parsed()) return cmd_sweep(cfg, flags);
        if (rank->parsed()) return cmd_rank(cfg, flags);
        if (report->parsed()) return cmd_report(cfg, flags);
        throw std::runtime_error("no subcommand");
    } catch (const std::exception& e) {
        if (flags.json_output) {
            json err = {{"error", {{"message", e.what()}}}};
            std::cout << err.dump(2) << '\n';
        }
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
