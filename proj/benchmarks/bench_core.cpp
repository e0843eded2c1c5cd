// Microbenchmarks for the hot paths: sparse propagation, neighborhood
// indexing, the confusion metric, and a whole training epoch.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "ncgcn/csr.hpp"
#include "ncgcn/dense.hpp"
#include "ncgcn/khop.hpp"
#include "ncgcn/metrics.hpp"
#include "ncgcn/rng.hpp"
#include "ncgcn/sbm.hpp"
#include "ncgcn/train.hpp"

namespace {

using namespace ncgcn;

Dataset make_dataset(std::int64_t n) {
    SbmSpec spec;
    spec.n = n;
    spec.num_classes = 4;
    spec.p_in = 20.0 / static_cast<double>(n);  // mean degree independent of n
    spec.p_out = 4.0 / static_cast<double>(n);
    spec.feature_dim = 32;
    spec.feature_noise = 0.5;
    spec.seed = 1;
    return gen_sbm(spec);
}

void bm_spmm(benchmark::State& state) {
    const Dataset data = make_dataset(state.range(0));
    const CsrMatrix s = symmetric_normalize(data.a, true);
    DenseMatrix h(data.n(), 64);
    Rng rng(7);
    for (double& v : h.data) v = rng.uniform(-1.0, 1.0);
    for (auto _ : state) {
        DenseMatrix out = spmm(s, h);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * s.nnz());
}
BENCHMARK(bm_spmm)->Arg(1000)->Arg(4000)->Arg(16000);

void bm_khop_index(benchmark::State& state) {
    const Dataset data = make_dataset(state.range(0));
    const int k = static_cast<int>(state.range(1));
    for (auto _ : state) {
        KHopIndex idx = khop_index(data.a, k);
        benchmark::DoNotOptimize(idx.offsets.data());
    }
}
BENCHMARK(bm_khop_index)->Args({1000, 1})->Args({1000, 2})->Args({4000, 1})->Args({4000, 2});

void bm_confusion(benchmark::State& state) {
    const Dataset data = make_dataset(state.range(0));
    const KHopIndex idx = khop_index(data.a, 1);
    for (auto _ : state) {
        MetricVector nc = neighborhood_confusion(idx, data.labels);
        benchmark::DoNotOptimize(nc.value.data());
    }
}
BENCHMARK(bm_confusion)->Arg(1000)->Arg(4000)->Arg(16000);

void bm_train_epoch(benchmark::State& state) {
    const Dataset data = make_dataset(state.range(0));
    TrainConfig cfg;
    cfg.hidden = 64;
    cfg.dropout_low = 0.5;
    cfg.dropout_high = 0.5;
    cfg.patience = 1;
    for (auto _ : state) {
        // lr 0 with patience 1 stops after the second epoch; per-iteration
        // cost is two full epochs plus one-time setup
        cfg.lr = 0.0;
        RunResult r = train(cfg, data);
        benchmark::DoNotOptimize(r.epochs_run);
    }
}
BENCHMARK(bm_train_epoch)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
