#include <benchmark/benchmark.h>

#include "dipe/kernels.hpp"
#include "dipe/moments.hpp"
#include "dipe/protocol.hpp"
#include "dipe/states.hpp"

using namespace dipe;

static void BM_CoeffB_Generic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto rho = states::StateFamily::parse("ghz:" + std::to_string(n)).make();
  for (auto _ : state) {
    double b = moments::coeff_B(rho, rho, moments::Ensemble::kHaar, true);
    benchmark::DoNotOptimize(b);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_CoeffB_Generic)->DenseRange(1, 4)->Complexity();

static void BM_CoeffB_StabilizerClifford(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sup = moments::StabilizerSupport::from_family(
      states::StateFamily::parse("chain:" + std::to_string(n) + ":" + std::to_string(n - 1)));
  for (auto _ : state) {
    double b = moments::coeff_B_stabilizer(sup, moments::Ensemble::kClifford);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_CoeffB_StabilizerClifford)->DenseRange(2, 10, 2);

static void BM_CoeffB_StabilizerHaar(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sup = moments::StabilizerSupport::from_family(
      states::StateFamily::parse("ghz:" + std::to_string(n)));
  for (auto _ : state) {
    double b = moments::coeff_B_stabilizer(sup, moments::Ensemble::kHaar);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_CoeffB_StabilizerHaar)->DenseRange(2, 7);

static void BM_CoeffC_Transfer(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto rho = states::StateFamily::parse("w:" + std::to_string(n)).make();
  for (auto _ : state) {
    double c = moments::coeff_C(rho, rho);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_CoeffC_Transfer)->DenseRange(1, 6);

static void BM_SectorTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto uk = kernels::unique_kernel(n);
  for (auto _ : state) {
    auto alpha = kernels::swap_sector_coefficients(uk);
    benchmark::DoNotOptimize(alpha);
  }
}
BENCHMARK(BM_SectorTransform)->DenseRange(2, 8, 2);

static void BM_SharedLrmBlocks(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto rho = states::StateFamily::parse("ghz:" + std::to_string(n)).make();
  protocol::RunConfig cfg;
  cfg.n = n;
  cfg.n_unitaries = 256;
  cfg.n_shots = 2;
  cfg.ensemble = protocol::EnsembleKind::kHaarLocal;
  for (auto _ : state) {
    cfg.seed++;
    auto rec = protocol::run_shared_lrm(rho, rho, cfg);
    benchmark::DoNotOptimize(rec.estimate);
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_unitaries);
}
BENCHMARK(BM_SharedLrmBlocks)->DenseRange(1, 6);

static void BM_TwirlSamples(benchmark::State& state) {
  for (auto _ : state) {
    auto check = moments::verify_twirl_identity(static_cast<std::uint64_t>(state.range(0)), 1);
    benchmark::DoNotOptimize(check.max_abs_deviation);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TwirlSamples)->Arg(10000);

BENCHMARK_MAIN();
