#include <benchmark/benchmark.h>

#include <filesystem>

#include "jsaforge/analysis.hpp"
#include "jsaforge/reconstruct.hpp"
#include "jsaforge/sfgmap.hpp"

using namespace jsaforge;

namespace {

const DispersionModel& model() {
    static const DispersionModel m =
        DispersionModel::load(std::filesystem::path(JSAFORGE_BENCH_DATA_DIR) / "models" / "ti_ppln.model");
    return m;
}

const JointMap& fig7_map() {
    static const JointMap m =
        synthesize_sfg_map(make_axis(1536, 1548, 0.01), make_axis(1536, 1548, 0.01), WaveguideSpec{}, model());
    return m;
}

void BM_DeltaK(benchmark::State& state) {
    const WaveguideSpec wg;
    double l = 1540.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(delta_k(l, 1544.0, wg, model()));
        l = l < 1545.0 ? l + 1e-3 : 1540.0;
    }
}
BENCHMARK(BM_DeltaK);

void BM_SynthesizeMap(benchmark::State& state) {
    const auto n = static_cast<double>(state.range(0));
    const auto ax = make_axis(1536, 1548, 12.0 / (n - 1));
    for (auto _ : state) benchmark::DoNotOptimize(synthesize_sfg_map(ax, ax, WaveguideSpec{}, model()));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ax.size() * ax.size()));
}
BENCHMARK(BM_SynthesizeMap)->Arg(101)->Arg(401)->Arg(1201)->Unit(benchmark::kMillisecond);

void BM_SchmidtDecompose(benchmark::State& state) {
    const auto jsi = jsi_from_sfg(fig7_map(), make_pump(770.9, state.range(0) / 10.0));
    for (auto _ : state) benchmark::DoNotOptimize(schmidt_decompose(jsi));
}
// pump FWHM 1 nm and 0.1 nm
BENCHMARK(BM_SchmidtDecompose)->Arg(10)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Fig7Report(benchmark::State& state) {
    ReportOptions o;
    o.signal_filter = make_filter(Arm::signal, 1541.8, GaussianLine::from_sigma(1541.8, 0.1).fwhm_nm);
    o.idler_filter = make_filter(Arm::idler, 1541.8, GaussianLine::from_sigma(1541.8, 0.1).fwhm_nm);
    for (auto _ : state) benchmark::DoNotOptimize(report(fig7_map(), make_pump(770.9, 1.0), o));
}
BENCHMARK(BM_Fig7Report)->Unit(benchmark::kMillisecond);

void BM_LoadMap(benchmark::State& state) {
    const auto path = std::filesystem::temp_directory_path() / "jsaforge-bench-scan.grid";
    save_map(synthesize_sfg_map(make_axis(1530, 1565, 1), make_axis(1530, 1565, 0.025), WaveguideSpec{}, model(),
                                {.peak_efficiency_per_w = 0.02}),
             path);
    for (auto _ : state) benchmark::DoNotOptimize(load_map(path));
    std::filesystem::remove(path);
}
BENCHMARK(BM_LoadMap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
