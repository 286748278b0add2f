// Serial reference kernels against the OpenMP kernels, plus thread scaling
// of one RK4 step.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "lohe/integrate.hpp"
#include "lohe/models.hpp"
#include "lohe/reference.hpp"
#include "lohe/rng.hpp"

using namespace lohe;

namespace {

Members members(std::size_t n, std::vector<std::size_t> dims) {
  CounterRng rng(1);
  Members z;
  for (std::size_t j = 0; j < n; ++j) z.push_back(random_unit_tensor(rng, streams::kMembers + j, TensorShape(dims)));
  return z;
}

std::vector<SkewHermitianGenerator> generators(std::size_t n, std::vector<std::size_t> dims) {
  CounterRng rng(2);
  std::vector<SkewHermitianGenerator> g;
  for (std::size_t j = 0; j < n; ++j)
    g.push_back(random_skew_hermitian(rng, streams::kGenerators + j, TensorShape(dims), 1.0));
  return g;
}

const CouplingVector& rank2_couplings() {
  static const auto c = CouplingVector::from_patterns(2, {{"00", 1.0}, {"01", 0.1}, {"10", 0.1}, {"11", 0.1}});
  return c;
}

void BM_LhsReference(benchmark::State& st) {
  const auto n = std::size_t(st.range(0));
  const auto z = members(n, {8});
  const auto g = generators(n, {8});
  for (auto _ : st) benchmark::DoNotOptimize(reference::lhs_field(z, g, 1.0, 0.2));
  st.SetItemsProcessed(st.iterations() * int64_t(n));
}

void BM_LhsParallel(benchmark::State& st) {
  const auto n = std::size_t(st.range(0));
  const auto z = members(n, {8});
  const auto g = generators(n, {8});
  omp_set_num_threads(int(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(lhs_field(z, g, 1.0, 0.2));
  st.SetItemsProcessed(st.iterations() * int64_t(n));
}

void BM_TensorReference(benchmark::State& st) {
  const auto n = std::size_t(st.range(0));
  const auto z = members(n, {4, 4});
  const auto g = generators(n, {4, 4});
  for (auto _ : st) benchmark::DoNotOptimize(reference::tensor_field(z, g, rank2_couplings()));
  st.SetItemsProcessed(st.iterations() * int64_t(n));
}

void BM_TensorParallel(benchmark::State& st) {
  const auto n = std::size_t(st.range(0));
  const auto z = members(n, {4, 4});
  const auto g = generators(n, {4, 4});
  omp_set_num_threads(int(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(tensor_field(z, g, rank2_couplings()));
  st.SetItemsProcessed(st.iterations() * int64_t(n));
}

PhaseModel phase_model(std::size_t n) {
  PhaseModel m = build_phase_model(EnsembleState(members(n, {3})), 1.0);
  CounterRng rng(3);
  for (std::size_t j = 0; j < n; ++j) m.theta[j] = rng.uniform(streams::kPhases, j);
  return m;
}

void BM_KuramotoReference(benchmark::State& st) {
  const auto m = phase_model(std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::kuramoto_field(m, m.theta));
}

void BM_KuramotoParallel(benchmark::State& st) {
  const auto m = phase_model(std::size_t(st.range(0)));
  omp_set_num_threads(int(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(kuramoto_field(m, m.theta));
}

void BM_Rk4StepLhs(benchmark::State& st) {
  const auto z = members(std::size_t(st.range(0)), {4});
  ModelParams p;
  p.kappa0 = 1.0;
  p.kappa1 = 0.2;
  const auto f = make_ensemble_rhs(p);
  omp_set_num_threads(int(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(step_rk4<Members>(f, z, 1e-3));
}

void threads(benchmark::internal::Benchmark* b, std::vector<int64_t> sizes) {
  const int max_threads = omp_get_num_procs();
  for (auto n : sizes)
    for (int t = 1; t <= max_threads; t *= 2) b->Args({n, t});
}

}  // namespace

BENCHMARK(BM_LhsReference)->Arg(64)->Arg(1024)->Arg(8192);
BENCHMARK(BM_LhsParallel)->Apply([](auto* b) { threads(b, {64, 1024, 8192}); });
BENCHMARK(BM_TensorReference)->Arg(64)->Arg(1024);
BENCHMARK(BM_TensorParallel)->Apply([](auto* b) { threads(b, {64, 1024}); });
BENCHMARK(BM_KuramotoReference)->Arg(256)->Arg(2048);
BENCHMARK(BM_KuramotoParallel)->Apply([](auto* b) { threads(b, {256, 2048}); });
BENCHMARK(BM_Rk4StepLhs)->Apply([](auto* b) { threads(b, {16, 4096}); });

BENCHMARK_MAIN();
