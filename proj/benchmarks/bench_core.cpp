#include <benchmark/benchmark.h>

#include <cmath>

#include "choqlab/energy.hpp"
#include "choqlab/riesz.hpp"
#include "exemplar.hpp"

using namespace choq;

namespace {

void BM_KernelBuild(benchmark::State& st) {
  const auto g = RadialGrid::make(6, 30.0, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(KernelTable::build(g, 2.0));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_KernelBuild)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EnergyEvaluate(benchmark::State& st) {
  const auto g = RadialGrid::make(6, 30.0, static_cast<std::size_t>(st.range(0)));
  const Problem pb = testing::exemplar_problem(g);
  const auto u = RadialField::from_function(g, [](double r) { return std::exp(-r * r / 4.0); });
  for (auto _ : st) benchmark::DoNotOptimize(energy(pb, FunctionalKind::full, u).total);
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_EnergyEvaluate)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMicrosecond)->Complexity();

void BM_GInverse(benchmark::State& st) {
  const auto m = testing::exemplar_model();
  double s = 0.0;
  for (auto _ : st) {
    s = s > 50.0 ? 0.01 : s * 1.01 + 0.01;
    benchmark::DoNotOptimize(m.G_inverse(s));
  }
}
BENCHMARK(BM_GInverse);

void BM_TranslatedIntegral(benchmark::State& st) {
  const auto g = RadialGrid::make(6, 30.0, 1024);
  const auto w = RadialField::from_function(g, [](double r) { return std::pow(1 + r, -2.5) * std::exp(-r); });
  const double R = static_cast<double>(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(translated_integral(w, R, [](double r, double gv) { return std::exp(-3.0 * r) * gv * gv; }));
}
BENCHMARK(BM_TranslatedIntegral)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
