// Microbenchmarks for the hot paths: instance generation, batch peeling,
// binomial sampling, single chain transitions, and the exact MGF recursion.
// Run `./microbench --benchmark_filter=peel` etc.

#include <benchmark/benchmark.h>

#include "peelmc/analysis.hpp"
#include "peelmc/chains.hpp"
#include "peelmc/hypergraph.hpp"
#include "peelmc/peeling.hpp"
#include "peelmc/rng.hpp"

using namespace peelmc;

namespace {

EnsembleParams bench_params(std::uint64_t n, std::uint64_t m) {
  EnsembleParams p;
  p.n = n;
  p.k = 3;
  p.m = m;
  p.ell = 100;
  p.seed = 42;
  return p;
}

void bm_generate(benchmark::State& state) {
  EnsembleParams p = bench_params(10000, static_cast<std::uint64_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    p.seed = ++seed;
    benchmark::DoNotOptimize(Hypergraph::generate(p));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_generate)->Arg(10000)->Arg(100000);

void bm_peel_batch(benchmark::State& state) {
  EnsembleParams p = bench_params(10000, static_cast<std::uint64_t>(state.range(0)));
  Hypergraph h = Hypergraph::generate(p);
  PeelConfig cfg;
  cfg.d = 2;
  for (auto _ : state) {
    PeelResult res = peel(h, cfg);
    benchmark::DoNotOptimize(res.removed_total);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_peel_batch)->Arg(10000)->Arg(100000);

void bm_sample_binomial(benchmark::State& state) {
  Rng rng(7);
  const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_binomial(rng, n, 0.3));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_sample_binomial)->Arg(8)->Arg(1000)->Arg(1000000);

void bm_step_exact(benchmark::State& state) {
  ChainParams p;
  p.n = 100000;
  p.k = 3;
  p.r = 3;
  p.m = 500000;
  p.ell = 316;
  Rng rng(11);
  ExactState st = init_exact(p, rng);
  for (auto _ : state) {
    if (st.frozen || p.live_at(st.t) <= p.k + 1) {
      state.PauseTiming();
      st = init_exact(p, rng);
      state.ResumeTiming();
    }
    step_exact(st, p, rng);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_step_exact);

void bm_mgf_exact(benchmark::State& state) {
  MgfQuery q;
  q.n = 100000;
  q.k = 3;
  q.r = 3;
  q.m = 500000;
  q.ell = 316;
  q.t = static_cast<std::uint64_t>(state.range(0));
  q.lambda = 0.2;
  for (auto _ : state)
    benchmark::DoNotOptimize(mgf_exact_dominating(q).log_value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_mgf_exact)->Arg(100)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
