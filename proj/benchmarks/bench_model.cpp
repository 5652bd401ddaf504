#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "squish/bayesnet.hpp"
#include "squish/model.hpp"

using namespace squish;

namespace {

Dataset chain(std::size_t n, std::size_t m) {
  std::mt19937_64 rng(2);
  std::vector<Column> cols;
  for (std::size_t i = 0; i < m; ++i) cols.push_back({"c" + std::to_string(i), CategoricalKind{4, {}}, 0.0});
  Dataset d{Schema(std::move(cols)), {}};
  for (std::size_t r = 0; r < n; ++r) {
    Tuple t(m);
    std::uint32_t x = rng() % 4;
    for (std::size_t i = 0; i < m; ++i) {
      if (rng() % 3 == 0) x = rng() % 4;
      t[i] = Cat{x};
    }
    d.rows.push_back(std::move(t));
  }
  return d;
}

void BM_FitCategorical(benchmark::State& state) {
  const auto d = chain(static_cast<std::size_t>(state.range(0)), 2);
  const auto domains = derive_domains(d.schema, d.rows);
  const std::vector<std::size_t> parents{0};
  for (auto _ : state) benchmark::DoNotOptimize(compute_obj(d.schema, domains, d.rows, 1, parents));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitCategorical)->Arg(2000)->Arg(20000);

void BM_FitNumeric(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d{Schema({{"x", NumericKind{false, Range{-8.0, 8.0}}, 0.01}}), {}};
  for (std::int64_t i = 0; i < state.range(0); ++i) d.rows.push_back({g(rng)});
  const auto domains = derive_domains(d.schema, d.rows);
  for (auto _ : state) benchmark::DoNotOptimize(compute_obj(d.schema, domains, d.rows, 0, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitNumeric)->Arg(2000);

void BM_LearnStructure(benchmark::State& state) {
  const auto d = chain(2000, static_cast<std::size_t>(state.range(0)));
  const auto domains = derive_domains(d.schema, d.rows);
  StructureSearchConfig cfg;
  cfg.memoize = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(learn_structure(d.schema, domains, d.rows, cfg));
}
BENCHMARK(BM_LearnStructure)->Args({8, 1})->Args({8, 0})->Args({16, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
