// Serial reference vs OpenMP kernels on one time level.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "prehyp/kernels.hpp"

using namespace prehyp;
using namespace prehyp::kernels;

namespace {

constexpr int kRank = 2;

struct Level {
  Stencil s;
  std::vector<cplx> u, v, f, ut, utt, out, out2;
  std::vector<cplx> m[6];

  explicit Level(int nx) : s{nx, kRank, 1.0 / nx, true} {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> d;
    auto fill = [&](std::vector<cplx>& x, std::size_t n) {
      x.resize(n);
      for (auto& z : x) z = {d(rng), d(rng)};
    };
    const std::size_t nv = static_cast<std::size_t>(nx) * kRank;
    for (auto* x : {&u, &v, &f, &ut, &utt, &out, &out2}) fill(*x, nv);
    for (auto& x : m) fill(x, nv * kRank);
  }
};

template <Exec E>
void first_order(benchmark::State& state) {
  Level l(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    first_order_rhs(E, l.s, l.m[0], l.m[1], l.u, l.out);
    benchmark::DoNotOptimize(l.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec E>
void second_order(benchmark::State& state) {
  Level l(static_cast<int>(state.range(0)));
  const SecondOrderSystemRow row{l.m[0], l.m[1], l.m[2], l.m[3], l.m[4], l.m[5]};
  for (auto _ : state) {
    second_order_rhs(E, l.s, row, l.u, l.v, l.f, l.out, l.out2);
    benchmark::DoNotOptimize(l.out2.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec E>
void dissipation(benchmark::State& state) {
  Level l(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    add_dissipation(E, l.s, 0.02, l.u, l.out);
    benchmark::DoNotOptimize(l.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec E>
void apply_second(benchmark::State& state) {
  Level l(static_cast<int>(state.range(0)));
  const SecondOrderOperatorRow row{l.m[0], l.m[1], l.m[2], l.m[3], l.m[4], l.m[5]};
  for (auto _ : state) {
    apply_second_order(E, l.s, row, l.u, l.ut, l.utt, l.out);
    benchmark::DoNotOptimize(l.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(first_order<Exec::serial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(first_order<Exec::parallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(second_order<Exec::serial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(second_order<Exec::parallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(dissipation<Exec::serial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(dissipation<Exec::parallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(apply_second<Exec::serial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(apply_second<Exec::parallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

BENCHMARK_MAIN();
