#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "squish/storage.hpp"

using namespace squish;

namespace {

Dataset mixed(std::size_t n) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d{Schema({{"c", CategoricalKind{3, {}}, 0.0},
                    {"x", NumericKind{false, Range{-10.0, 10.0}}, 0.01},
                    {"k", NumericKind{true, Range{0.0, 100.0}}, 0.0},
                    {"s", StringKind{8}, 0.0}}),
            {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double z = g(rng);
    const auto c = static_cast<std::uint32_t>(z < -0.5 ? 0 : z < 0.5 ? 1 : 2);
    d.rows.push_back({Cat{c}, std::clamp(3.0 * z + 0.1 * g(rng), -10.0, 10.0),
                      std::clamp(std::round(50.0 + 15.0 * z), 0.0, 100.0), std::string(c + 1, 'a' + c)});
  }
  return d;
}

void BM_Compress(benchmark::State& state) {
  const auto d = mixed(static_cast<std::size_t>(state.range(0)));
  CompressOptions opts;
  opts.index = true;
  for (auto _ : state) benchmark::DoNotOptimize(compress(d, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Compress)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DecompressAll(benchmark::State& state) {
  const auto d = mixed(static_cast<std::size_t>(state.range(0)));
  const auto archive = Archive::parse(compress(d));
  for (auto _ : state) benchmark::DoNotOptimize(archive.decode_all());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecompressAll)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RandomAccess(benchmark::State& state) {
  const auto d = mixed(10000);
  CompressOptions opts;
  opts.index = true;
  const auto archive = Archive::parse(compress(d, opts));
  std::mt19937_64 rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(archive.read_tuple_at(rng() % 10000));
}
BENCHMARK(BM_RandomAccess);

}  // namespace

BENCHMARK_MAIN();
