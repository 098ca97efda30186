#include "lorasf/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "lorasf/rng.hpp"
#include "lorasf/version.hpp"

namespace lorasf {

namespace {

struct Task {
    int serial;
    ModelKind kind;
};

nlohmann::json confusion_to_json(const ConfusionMatrix& cm) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < cm.size(); ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t p = 0; p < cm.size(); ++p) row.push_back(cm.at(t, p));
        rows.push_back(std::move(row));
    }
    return {{"classes", cm.classes}, {"counts", std::move(rows)}};
}

ConfusionMatrix confusion_from_json(const nlohmann::json& j) {
    ConfusionMatrix cm;
    cm.classes = j.at("classes").get<std::vector<int>>();
    for (const auto& row : j.at("counts")) {
        for (const auto& cell : row) cm.counts.push_back(cell.get<std::int64_t>());
    }
    if (cm.counts.size() != cm.classes.size() * cm.classes.size()) {
        throw std::invalid_argument("sweep json: confusion matrix shape mismatch");
    }
    return cm;
}

nlohmann::json run_to_json(const EvalRun& run, bool include_timing) {
    nlohmann::json per_class = nlohmann::json::array();
    for (const ClassMetrics& m : run.per_class) {
        per_class.push_back({
            {"label", m.label},
            {"support", m.support},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
        });
    }
    nlohmann::json j = {
        {"serial", run.serial},
        {"label", run.label},
        {"kind", model_kind_name(run.kind)},
        {"chosen_k", run.chosen_k},
        {"accuracy", run.accuracy},
        {"weighted_f1", run.weighted_f1},
        {"macro_f1", run.macro_f1},
        {"per_class", std::move(per_class)},
        {"confusion", confusion_to_json(run.confusion)},
        {"partition_hash", run.partition_hash},
        {"model_seed", run.model_seed},
        {"failed", run.failed},
        {"error", run.error},
    };
    if (include_timing) j["seconds"] = run.seconds;
    return j;
}

EvalRun run_from_json(const nlohmann::json& j) {
    EvalRun run;
    run.serial = j.at("serial").get<int>();
    run.label = j.at("label").get<std::string>();
    run.kind = parse_model_kind(j.at("kind").get<std::string>());
    run.chosen_k = j.at("chosen_k").get<int>();
    run.accuracy = j.at("accuracy").get<double>();
    run.weighted_f1 = j.at("weighted_f1").get<double>();
    run.macro_f1 = j.at("macro_f1").get<double>();
    for (const auto& jm : j.at("per_class")) {
        ClassMetrics m;
        m.label = jm.at("label").get<int>();
        m.support = jm.at("support").get<std::int64_t>();
        m.precision = jm.at("precision").get<double>();
        m.recall = jm.at("recall").get<double>();
        m.f1 = jm.at("f1").get<double>();
        run.per_class.push_back(m);
    }
    run.confusion = confusion_from_json(j.at("confusion"));
    run.partition_hash = j.at("partition_hash").get<std::uint64_t>();
    run.model_seed = j.at("model_seed").get<std::uint64_t>();
    run.failed = j.at("failed").get<bool>();
    run.error = j.at("error").get<std::string>();
    if (auto it = j.find("seconds"); it != j.end()) run.seconds = it->get<double>();
    return run;
}

}  // namespace

std::vector<int> SweepPlan::effective_serials() const {
    if (!serials.empty()) {
        std::vector<int> out = serials;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        for (int s : out) {
            if (s < 1 || s > 31) throw std::invalid_argument("serial out of range: " + std::to_string(s));
        }
        return out;
    }
    std::vector<int> out(31);
    for (int i = 0; i < 31; ++i) out[static_cast<std::size_t>(i)] = i + 1;
    return out;
}

std::vector<ModelKind> SweepPlan::effective_kinds() const {
    if (!kinds.empty()) {
        std::vector<ModelKind> out = kinds;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    return {kAllModelKinds.begin(), kAllModelKinds.end()};
}

void SweepPlan::validate() const {
    hyperparams.validate();
    split.validate();
    if (workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");
    (void)effective_serials();
}

std::vector<SerialAverage> aggregate_averages(const std::vector<EvalRun>& runs) {
    std::map<int, std::vector<const EvalRun*>> by_serial;
    for (const EvalRun& run : runs) {
        if (run.failed) {
            throw std::invalid_argument("aggregate: run for serial " + std::to_string(run.serial) +
                                        " failed");
        }
        by_serial[run.serial].push_back(&run);
    }
    std::vector<SerialAverage> out;
    for (const auto& [serial, group] : by_serial) {
        if (group.size() != kAllModelKinds.size()) {
            throw std::invalid_argument("aggregate: serial " + std::to_string(serial) +
                                        " does not have exactly one run per model kind");
        }
        std::array<bool, 4> seen{};
        SerialAverage avg;
        avg.serial = serial;
        for (const EvalRun* run : group) {
            if (seen[static_cast<std::size_t>(run->kind)]) {
                throw std::invalid_argument("aggregate: duplicate kind for serial " +
                                            std::to_string(serial));
            }
            seen[static_cast<std::size_t>(run->kind)] = true;
            avg.avg_accuracy += run->accuracy;
            avg.avg_weighted_f1 += run->weighted_f1;
        }
        avg.avg_accuracy /= 4.0;
        avg.avg_weighted_f1 /= 4.0;
        out.push_back(avg);
    }
    return out;
}

SweepReport run_sweep(const Dataset& ds, const SweepPlan& plan, const SweepReport* resume_from,
                      const SweepProgress& progress, const std::atomic<bool>* cancel) {
    plan.validate();
    for (FeatureId id : kAllFeatures) {
        if (!ds.has_column(feature_name(id))) {
            throw std::invalid_argument("sweep: dataset is missing the " + feature_name(id) +
                                        " column");
        }
    }

    const std::vector<int> serials = plan.effective_serials();
    const std::vector<ModelKind> kinds = plan.effective_kinds();
    const ComboCatalog& catalog = enumerate_combinations();

    // One shared split per sweep: every run sees the same partition, so
    // per-combination comparisons are paired.
    SplitResult split = train_test_split(ds, plan.split);
    const std::uint64_t partition_hash =
        derive_seed(split.train.content_hash(), {split.test.content_hash()});

    SweepReport report;
    report.metadata.dataset_hash = ds.content_hash();
    report.metadata.base_seed = plan.base_seed;
    report.metadata.split = plan.split;
    report.metadata.standardize = plan.hyperparams.standardize;
    report.metadata.hyperparams_json = plan.hyperparams.to_json();
    report.metadata.software_version = kVersion;
    report.metadata.serials = serials;
    for (ModelKind kind : kinds) report.metadata.kinds.push_back(model_kind_name(kind));

    // Completed runs from a previous report are reusable when the dataset,
    // seeds and hyperparameters all match.
    std::map<std::pair<int, int>, const EvalRun*> reusable;
    if (resume_from) {
        const SweepMetadata& m = resume_from->metadata;
        const bool compatible = m.dataset_hash == report.metadata.dataset_hash &&
                                m.base_seed == plan.base_seed &&
                                m.split.train_fraction == plan.split.train_fraction &&
                                m.split.seed == plan.split.seed &&
                                m.split.stratified == plan.split.stratified &&
                                m.hyperparams_json == report.metadata.hyperparams_json;
        if (compatible) {
            for (const EvalRun& run : resume_from->runs) {
                if (!run.failed) {
                    reusable[{run.serial, static_cast<int>(run.kind)}] = &run;
                }
            }
        }
    }

    std::vector<Task> tasks;
    tasks.reserve(serials.size() * kinds.size());
    for (int serial : serials) {
        for (ModelKind kind : kinds) tasks.push_back({serial, kind});
    }

    std::vector<EvalRun> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort_flag{false};
    std::mutex mu;
    std::exception_ptr first_error;
    std::size_t done = 0;

    auto execute = [&](const Task& task) -> EvalRun {
        EvalRun run;
        run.serial = task.serial;
        run.kind = task.kind;
        const FeatureSet& fs = catalog.by_serial(task.serial);
        run.label = fs.label;
        run.partition_hash = partition_hash;
        run.model_seed = derive_seed(
            plan.base_seed, {seed_stream::kRun, static_cast<std::uint64_t>(task.serial),
                             static_cast<std::uint64_t>(task.kind)});

        const auto start = std::chrono::steady_clock::now();
        Dataset train_fs = select_features(split.train, fs);
        Dataset test_fs = select_features(split.test, fs);

        Hyperparams hp = plan.hyperparams;
        hp.dtc_seed = run.model_seed;
        hp.rf_seed = run.model_seed;
        hp.knn_subsample_seed = run.model_seed;

        TrainedModel model = train(task.kind, train_fs, hp, &test_fs);
        const std::vector<int> preds = model.predict(test_fs);
        const ClassificationReport cr = classification_report(test_fs.labels(), preds);

        run.chosen_k = task.kind == ModelKind::Knn ? model.knn().k : 0;
        run.accuracy = cr.accuracy;
        run.weighted_f1 = cr.weighted_f1;
        run.macro_f1 = cr.macro_f1;
        run.per_class = cr.per_class;
        run.confusion = cr.confusion;
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return run;
    };

    auto worker = [&]() {
        for (;;) {
            if (abort_flag.load(std::memory_order_relaxed)) return;
            if (cancel && cancel->load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= tasks.size()) return;

            EvalRun run;
            const auto key = std::make_pair(tasks[i].serial, static_cast<int>(tasks[i].kind));
            if (auto it = reusable.find(key); it != reusable.end()) {
                run = *it->second;
            } else {
                try {
                    run = execute(tasks[i]);
                } catch (const std::exception& e) {
                    run.serial = tasks[i].serial;
                    run.kind = tasks[i].kind;
                    run.label = catalog.by_serial(tasks[i].serial).label;
                    run.failed = true;
                    run.error = e.what();
                    if (!plan.keep_going) {
                        std::lock_guard<std::mutex> lock(mu);
                        if (!first_error) {
                            first_error = std::make_exception_ptr(std::runtime_error(
                                "sweep run failed (serial " + std::to_string(run.serial) + ", " +
                                model_kind_name(run.kind) + "): " + run.error));
                        }
                        abort_flag.store(true, std::memory_order_relaxed);
                    }
                }
            }

            results[i] = std::move(run);
            if (progress) {
                std::lock_guard<std::mutex> lock(mu);
                ++done;
                progress(results[i], done, tasks.size());
            } else {
                std::lock_guard<std::mutex> lock(mu);
                ++done;
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(plan.workers, static_cast<int>(tasks.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    if (first_error) std::rethrow_exception(first_error);

    const bool cancelled = cancel && cancel->load(std::memory_order_relaxed);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (results[i].label.empty() && results[i].serial == 0) {
            if (!cancelled) {
                throw std::logic_error("sweep: task was never executed");
            }
            results[i].serial = tasks[i].serial;
            results[i].kind = tasks[i].kind;
            results[i].label = catalog.by_serial(tasks[i].serial).label;
            results[i].failed = true;
            results[i].error = "cancelled";
        }
    }
    report.runs = std::move(results);

    // Averages cover serials for which all four kinds ran and succeeded.
    if (kinds.size() == kAllModelKinds.size()) {
        std::vector<EvalRun> complete;
        for (int serial : serials) {
            std::vector<EvalRun> group;
            for (const EvalRun& run : report.runs) {
                if (run.serial == serial && !run.failed) group.push_back(run);
            }
            if (group.size() == kAllModelKinds.size()) {
                complete.insert(complete.end(), group.begin(), group.end());
            }
        }
        if (!complete.empty()) report.averages = aggregate_averages(complete);
    }
    return report;
}

std::string SweepReport::to_json(bool include_timing) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["metadata"] = {
        {"dataset_hash", metadata.dataset_hash},
        {"base_seed", metadata.base_seed},
        {"split",
         {{"train_fraction", metadata.split.train_fraction},
          {"seed", metadata.split.seed},
          {"stratified", metadata.split.stratified}}},
        {"standardize", metadata.standardize},
        {"hyperparams", nlohmann::json::parse(metadata.hyperparams_json)},
        {"software_version", metadata.software_version},
        {"serials", metadata.serials},
        {"kinds", metadata.kinds},
    };
    nlohmann::json runs_json = nlohmann::json::array();
    for (const EvalRun& run : runs) runs_json.push_back(run_to_json(run, include_timing));
    j["runs"] = std::move(runs_json);
    nlohmann::json avgs = nlohmann::json::array();
    for (const SerialAverage& a : averages) {
        avgs.push_back({{"serial", a.serial},
                        {"avg_accuracy", a.avg_accuracy},
                        {"avg_weighted_f1", a.avg_weighted_f1}});
    }
    j["averages"] = std::move(avgs);
    return j.dump(2);
}

SweepReport SweepReport::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format_version").get<int>() != 1) {
        throw std::invalid_argument("sweep json: unsupported format version");
    }
    SweepReport report;
    const nlohmann::json& m = j.at("metadata");
    report.metadata.dataset_hash = m.at("dataset_hash").get<std::uint64_t>();
    report.metadata.base_seed = m.at("base_seed").get<std::uint64_t>();
    report.metadata.split.train_fraction = m.at("split").at("train_fraction").get<double>();
    report.metadata.split.seed = m.at("split").at("seed").get<std::uint64_t>();
    report.metadata.split.stratified = m.at("split").at("stratified").get<bool>();
    report.metadata.standardize = m.at("standardize").get<bool>();
    report.metadata.hyperparams_json = m.at("hyperparams").dump();
    report.metadata.software_version = m.at("software_version").get<std::string>();
    report.metadata.serials = m.at("serials").get<std::vector<int>>();
    report.metadata.kinds = m.at("kinds").get<std::vector<std::string>>();
    for (const auto& jr : j.at("runs")) report.runs.push_back(run_from_json(jr));
    for (const auto& ja : j.at("averages")) {
        SerialAverage a;
        a.serial = ja.at("serial").get<int>();
        a.avg_accuracy = ja.at("avg_accuracy").get<double>();
        a.avg_weighted_f1 = ja.at("avg_weighted_f1").get<double>();
        report.averages.push_back(a);
    }
    return report;
}

std::string SweepReport::to_csv() const {
    std::ostringstream out;
    out << "serial,label,kind,accuracy,weighted_f1,k,seconds\n";
    out.precision(17);
    for (const EvalRun& run : runs) {
        out << run.serial << ',' << run.label << ',' << model_kind_name(run.kind) << ','
            << run.accuracy << ',' << run.weighted_f1 << ',';
        if (run.kind == ModelKind::Knn) out << run.chosen_k;
        out << ',' << run.seconds << '\n';
    }
    return out.str();
}

}  // namespace lorasf
