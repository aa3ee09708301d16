#include <benchmark/benchmark.h>

#include "mimobc/channel.hpp"
#include "mimobc/precoding.hpp"
#include "mimobc/rates.hpp"

using namespace mimobc;

namespace {

ChannelSet fixed_channel(const SystemDims& dims) {
  RngStream rng(99);
  return sample_channel(dims, SnrProfile::symmetric(dims.users), rng);
}

void BM_QrDecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1);
  const Matrix a = sample_complex_gaussian(rng, n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qr_decompose(a));
  }
}
BENCHMARK(BM_QrDecompose)->Arg(4)->Arg(8)->Arg(16);

void BM_NullspaceProjector(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  RngStream rng(2);
  std::vector<RowVector> rows;
  for (int i = 0; i < m - 1; ++i) {
    rows.push_back(sample_complex_gaussian(rng, 1, m));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(nullspace_projector(rows, m));
  }
}
BENCHMARK(BM_NullspaceProjector)->Arg(4)->Arg(8)->Arg(16);

void BM_ZfGains(benchmark::State& state) {
  const int kn = static_cast<int>(state.range(0));
  const ChannelSet cs = fixed_channel(SystemDims{kn, kn, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(zf_effective_gains(cs));
  }
}
BENCHMARK(BM_ZfGains)->Arg(4)->Arg(8);

void BM_BdEffective(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ChannelSet cs = fixed_channel(SystemDims{2 * k, k, 2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(bd_effective_channels(cs));
  }
}
BENCHMARK(BM_BdEffective)->Arg(2)->Arg(4);

void BM_DpcExact(benchmark::State& state) {
  const ChannelSet cs = fixed_channel(SystemDims{4, 2, 2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpc_sum_rate_exact(cs, 10.0));
  }
}
BENCHMARK(BM_DpcExact);

void BM_WeightedExact(benchmark::State& state) {
  const ChannelSet cs = fixed_channel(SystemDims{4, 3, 1});
  const WeightVector mu{{0.5, 0.3, 0.2}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_sum_rate_dpc_exact(cs, mu, 10.0));
  }
}
BENCHMARK(BM_WeightedExact);

}  // namespace

BENCHMARK_MAIN();
