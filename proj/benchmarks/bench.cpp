#include <benchmark/benchmark.h>

#include <vector>

#include "conicvol/bounds.hpp"
#include "conicvol/extremal.hpp"
#include "conicvol/lemma.hpp"
#include "conicvol/levelset.hpp"
#include "conicvol/radial.hpp"

using namespace conicvol;

namespace {

const std::vector<double> kOrders{-0.5, -0.3};

void BM_VolumeBounds(benchmark::State& state) {
  const Divisor d = Divisor::from_orders(kOrders);
  const CurvatureBand band(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(volume_bounds(d, band));
}
BENCHMARK(BM_VolumeBounds);

void BM_BuildExtremal(benchmark::State& state) {
  const Divisor d = Divisor::from_orders(kOrders);
  const CurvatureBand band(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(extremal::build_extremal(extremal::ModelKind::Vab, d, band));
}
BENCHMARK(BM_BuildExtremal);

void BM_VolumeQuadrature(benchmark::State& state) {
  const auto m = extremal::build_extremal(extremal::ModelKind::Vab, Divisor::from_orders(kOrders),
                                          CurvatureBand(-1.0, 1.0));
  const auto p = m.profile();
  for (auto _ : state) benchmark::DoNotOptimize(geometry::volume(p));
}
BENCHMARK(BM_VolumeQuadrature);

void BM_SampleRadial(benchmark::State& state) {
  const auto m = extremal::build_extremal(extremal::ModelKind::Vmin, Divisor::from_orders(std::vector{-0.5}),
                                          CurvatureBand(0.25, 1.0));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(levelset::sample_radial(m, {20.0, n}));
}
BENCHMARK(BM_SampleRadial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Summarize(benchmark::State& state) {
  const auto m = extremal::build_extremal(extremal::ModelKind::Vmin, Divisor::from_orders(std::vector{-0.5}),
                                          CurvatureBand(0.25, 1.0));
  const auto g = levelset::sample_radial(m, {20.0, static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(levelset::summarize(g));
}
BENCHMARK(BM_Summarize)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_IsoDeficit(benchmark::State& state) {
  const auto m = extremal::build_extremal(extremal::ModelKind::Vmin, Divisor{}, CurvatureBand(1.0, 1.0));
  const auto g = levelset::sample_radial(m, {20.0, 1024});
  for (auto _ : state) benchmark::DoNotOptimize(levelset::iso_deficit(g, 0.0));
}
BENCHMARK(BM_IsoDeficit)->Unit(benchmark::kMillisecond);

void BM_BruteForceMax(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lemma::brute_force_max(10.0, 4.0, -1.0, 1.0, n));
}
BENCHMARK(BM_BruteForceMax)->Arg(64)->Arg(1000);

void BM_RandomSearch(benchmark::State& state) {
  const lemma::RandomSearchOptions opts{16, 2000, 1};
  for (auto _ : state) benchmark::DoNotOptimize(lemma::random_search_max(10.0, 4.0, -1.0, 1.0, 64, opts));
}
BENCHMARK(BM_RandomSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
