#include <random>

#include <benchmark/benchmark.h>

#include "hardy/analysis.hpp"
#include "hardy/commutants.hpp"
#include "hardy/invariant_subspaces.hpp"

using namespace hardy;

namespace {

const ToleranceConfig kTol;

void BM_ShiftFromKernel(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const TridiagonalKernel k = random_kernel(3, 0.9, rng);
  for (auto _ : state) benchmark::DoNotOptimize(shift_from_kernel(k, order));
}
BENCHMARK(BM_ShiftFromKernel)->Arg(64)->Arg(128)->Arg(256);

void BM_BlaschkeTaylor(benchmark::State& state) {
  const BlaschkeProduct theta(1.0, {0.5, Complex(-0.3, 0.4), Complex(0.1, 0.7), 0.2});
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(blaschke_taylor(theta, order));
}
BENCHMARK(BM_BlaschkeTaylor)->Arg(128)->Arg(1024);

void BM_BuildSubspace(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const SubspaceModel model = s1_model(1.0, 1.0, BlaschkeProduct(1.0, {0.5}), order);
  for (auto _ : state) benchmark::DoNotOptimize(build_subspace(model, s, kTol, trunc));
}
BENCHMARK(BM_BuildSubspace)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SubspaceDifference(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const Subspace m =
      build_subspace(s1_model(1.0, 1.0, BlaschkeProduct(1.0, {0.5}), order), s, kTol, trunc).M;
  for (auto _ : state) benchmark::DoNotOptimize(subspace_difference(m, s.S, kTol, trunc.slack));
}
BENCHMARK(BM_SubspaceDifference)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ExtractModel(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = rank_one_two_shift(order);
  std::mt19937_64 rng(3);
  const KrylovSeed seed = random_krylov_seed(s, rng, 2, trunc);
  const Subspace m =
      krylov_closure(s.S, seed.f, default_krylov_depth(trunc, 2, seed.theta.degree()), kTol);
  for (auto _ : state) benchmark::DoNotOptimize(extract_model(m, s, kTol, trunc));
}
BENCHMARK(BM_ExtractModel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_CommutantElement(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const TridiagonalKernel k = random_kernel(2, 0.9, rng);
  const Polynomial phi = random_symbol(8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(commutant_element(phi, k, order, kTol));
}
BENCHMARK(BM_CommutantElement)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SelfCommutator(benchmark::State& state) {
  const NShift s = tridiagonal_one_shift(1.0, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(self_commutator(s, kTol));
}
BENCHMARK(BM_SelfCommutator)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
