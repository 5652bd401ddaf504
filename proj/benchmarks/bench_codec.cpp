#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "squish/codec.hpp"

using namespace squish;

namespace {

struct Workload {
  std::vector<std::vector<GridInterval>> tilings;
  std::vector<std::size_t> choices;
};

Workload make_workload(std::size_t steps, std::size_t branches) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const ApproxConfig cfg;
  Workload w;
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<double> p(branches);
    double sum = 0.0;
    for (auto& x : p) sum += x = u(rng);
    for (auto& x : p) x /= sum;
    w.tilings.push_back(cumulative_intervals(p, cfg));
    w.choices.push_back(rng() % branches);
  }
  return w;
}

void BM_Encode(benchmark::State& state) {
  const auto w = make_workload(1024, static_cast<std::size_t>(state.range(0)));
  Encoder enc;
  for (auto _ : state) {
    for (std::size_t i = 0; i < w.choices.size(); ++i) enc.push(w.tilings[i][w.choices[i]]);
    benchmark::DoNotOptimize(enc.finish());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.choices.size()));
}
BENCHMARK(BM_Encode)->Arg(2)->Arg(16)->Arg(256);

void BM_Decode(benchmark::State& state) {
  const auto w = make_workload(1024, static_cast<std::size_t>(state.range(0)));
  Encoder enc;
  for (std::size_t i = 0; i < w.choices.size(); ++i) enc.push(w.tilings[i][w.choices[i]]);
  const BitString code = enc.finish();
  const SpanBitSource source(code);
  for (auto _ : state) {
    Decoder dec(source);
    for (const auto& t : w.tilings) benchmark::DoNotOptimize(dec.next_branch(t));
    dec.finish();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.choices.size()));
}
BENCHMARK(BM_Decode)->Arg(2)->Arg(16)->Arg(256);

void BM_CumulativeIntervals(benchmark::State& state) {
  std::vector<double> p(static_cast<std::size_t>(state.range(0)), 1.0 / static_cast<double>(state.range(0)));
  const ApproxConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cumulative_intervals(p, cfg));
}
BENCHMARK(BM_CumulativeIntervals)->Arg(2)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
