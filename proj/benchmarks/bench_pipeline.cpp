#include <benchmark/benchmark.h>

#include "cvt/dataset.hpp"
#include "cvt/forest.hpp"
#include "cvt/mlp.hpp"
#include "cvt/path_ranking.hpp"
#include "cvt/rng.hpp"

namespace {

cvt::LabeledTable synthetic_blobs(std::size_t per_class, std::size_t n_classes,
                                  std::uint64_t seed) {
    cvt::Rng rng(seed);
    cvt::LabeledTable t;
    t.feature_names = {"f0", "f1", "f2", "f3"};
    for (std::size_t c = 0; c < n_classes; ++c) t.class_names.push_back("c" + std::to_string(c));
    t.features = cvt::Matrix(per_class * n_classes, 4);
    t.labels.resize(per_class * n_classes);
    for (std::size_t i = 0; i < t.n_samples(); ++i) {
        const auto cls = i % n_classes;
        t.labels[i] = static_cast<int>(cls);
        for (std::size_t f = 0; f < 4; ++f)
            t.features(i, f) = static_cast<double>(cls) + 0.4 * rng.normal();
    }
    return t;
}

void BM_TrainEpoch(benchmark::State& state) {
    const cvt::LabeledTable data = synthetic_blobs(40, 3, 11);
    cvt::MlpSpec spec;
    spec.layer_widths = {4, 6, 6, 3};
    spec.seed = 1;
    const cvt::MlpModel model = cvt::init(spec);
    cvt::TrainConfig cfg;
    cfg.epochs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cvt::train(model, data, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(10)->Arg(100);

void BM_PathRanking(benchmark::State& state) {
    cvt::Rng rng(2);
    const std::vector<std::size_t> widths{4, 6, 6, 3};
    std::vector<cvt::LayerCorrelation> mats;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        cvt::LayerCorrelation m;
        m.source_layer = l;
        m.target_layer = l + 1;
        m.values = cvt::Matrix(widths[l], widths[l + 1]);
        m.defined.assign(widths[l] * widths[l + 1], 1);
        m.reasons.assign(widths[l] * widths[l + 1], "");
        for (double& v : m.values.data()) v = 2.0 * rng.uniform() - 1.0;
        mats.push_back(std::move(m));
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(cvt::rank_paths(cvt::compute_path_records(widths, mats)));
}
BENCHMARK(BM_PathRanking);

void BM_ForestFit(benchmark::State& state) {
    const cvt::LabeledTable data = synthetic_blobs(40, 3, 21);
    cvt::ForestConfig cfg;
    cfg.n_trees = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cvt::fit_forest(data, cfg));
}
BENCHMARK(BM_ForestFit)->Arg(10)->Arg(100);

} // namespace

BENCHMARK_MAIN();
