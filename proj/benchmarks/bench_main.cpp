#include <benchmark/benchmark.h>

#include "gputherm/fixture.hpp"
#include "gputherm/render.hpp"
#include "gputherm/thermal.hpp"

using namespace gputherm;

namespace {

const LayerStack& fermi_stack() {
    static const LayerStack stack =
        build_fermi_stack(generate_layer0(ChipSpec{}), generate_layer2(ChipSpec{}));
    return stack;
}

void BM_Discretize(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        GridModel model = discretize(fermi_stack(), n, n);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_Discretize)->Arg(16)->Arg(64)->Arg(128);

void BM_SteadyState(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GridModel model = discretize(fermi_stack(), n, n);
    const std::map<std::string, double> powers{
        {"L2", 4.0}, {"DRAM_R1", 3.0}, {"SM0_EXE", 2.0}, {"SM15_EXE", 2.0}};
    for (auto _ : state) {
        TemperatureField field = steady_state(model, powers);
        benchmark::DoNotOptimize(field);
    }
}
BENCHMARK(BM_SteadyState)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Transient100Steps(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GridModel model = discretize(fermi_stack(), n, n);
    PowerTrace trace;
    trace.unit_names = {"L2", "SM7_EXE"};
    trace.rows.assign(100, {4.0, 2.0});
    for (auto _ : state) {
        auto fields = transient(model, trace, 1e-3);
        benchmark::DoNotOptimize(fields);
    }
}
BENCHMARK(BM_Transient100Steps)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_RenderLayer(benchmark::State& state) {
    const GridModel model = discretize(fermi_stack(), 64, 64);
    const TemperatureField field = steady_state(model, {{"L2", 4.0}, {"DRAM_R1", 3.0}});
    const ColorScale scale = ColorScale::auto_range(field, 2);
    const Floorplan overlay = generate_layer2(ChipSpec{});
    for (auto _ : state) {
        HeatmapImage img = render_layer(field, 2, scale, 8, &overlay);
        benchmark::DoNotOptimize(img);
    }
}
BENCHMARK(BM_RenderLayer)->Unit(benchmark::kMillisecond);

void BM_FixtureMapping(benchmark::State& state) {
    const Floorplan fp0 = generate_layer0(ChipSpec{});
    const Floorplan fp2 = generate_layer2(ChipSpec{});
    const PowerReport report = fixture_report({Kernel::MatmulLinear, 800, false});
    const ComponentMapping mapping = fixture_mapping(fp0, fp2);
    for (auto _ : state) {
        MapResult result = map_to_units(report, mapping, fp0, fp2);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_FixtureMapping);

} // namespace

BENCHMARK_MAIN();
