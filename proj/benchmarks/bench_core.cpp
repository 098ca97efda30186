#include <benchmark/benchmark.h>

#include "lorasf/metrics.hpp"
#include "lorasf/models.hpp"
#include "lorasf/split.hpp"
#include "lorasf/synthetic.hpp"

using namespace lorasf;

namespace {

Dataset bench_dataset(std::size_t rows) {
    SyntheticConfig cfg;
    cfg.n_rows = rows;
    cfg.seed = 7;
    return generate_synthetic(cfg);
}

void BM_SyntheticGenerate(benchmark::State& state) {
    SyntheticConfig cfg;
    cfg.n_rows = static_cast<std::size_t>(state.range(0));
    cfg.seed = 7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_synthetic(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SyntheticGenerate)->Arg(1000)->Arg(20000);

void BM_CartTrain(benchmark::State& state) {
    const Dataset ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtc_train(ds, 42));
    }
}
BENCHMARK(BM_CartTrain)->Arg(2000)->Arg(16000);

void BM_RfTrain(benchmark::State& state) {
    const Dataset ds = bench_dataset(4000);
    Hyperparams hp;
    hp.rf_n_estimators = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rf_train(ds, hp));
    }
}
BENCHMARK(BM_RfTrain)->Arg(10)->Arg(50);

void BM_KnnPredict(benchmark::State& state) {
    const Dataset ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    SplitSpec spec;
    const SplitResult split = train_test_split(ds, spec);
    Hyperparams hp;
    TrainedModel model = knn_train(split.train, hp, &split.test);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.predict(split.test));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(split.test.rows()));
}
BENCHMARK(BM_KnnPredict)->Arg(4000)->Arg(16000);

void BM_MlrTrain(benchmark::State& state) {
    const Dataset ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    Hyperparams hp;
    hp.mlr_max_iter = 200;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mlr_train(ds, hp));
    }
}
BENCHMARK(BM_MlrTrain)->Arg(2000)->Arg(16000);

void BM_Pearson(benchmark::State& state) {
    const Dataset ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rank_features(ds));
    }
}
BENCHMARK(BM_Pearson)->Arg(20000);

void BM_WeightedF1(benchmark::State& state) {
    const Dataset ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
    std::vector<int> preds = ds.labels();
    for (std::size_t i = 0; i < preds.size(); i += 7) preds[i] = 7 + (preds[i] - 6) % 6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(classification_report(ds.labels(), preds));
    }
}
BENCHMARK(BM_WeightedF1)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
