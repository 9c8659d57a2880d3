#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "nmchain/chain.hpp"
#include "nmchain/kernels.hpp"
#include "nmchain/laplace_inversion.hpp"
#include "nmchain/nonmarkovian.hpp"
#include "nmchain/qsd.hpp"
#include "nmchain/special_functions.hpp"

using namespace nmchain;
using cplx = std::complex<double>;

namespace {

SpectralDensity reservoir(int family) {
  switch (family) {
    case 0: return presets::lorentzian();
    case 1: return presets::lorentzian_squared();
    default: return presets::ohmic();
  }
}

NonMarkovianSettings window(double t_end) {
  NonMarkovianSettings s;
  s.t_end = t_end;
  s.n_samples = 4096;
  return s;
}

void BM_Volterra(benchmark::State& state) {
  const auto cfg = ChainConfig::first_site_excited(static_cast<int>(state.range(0)));
  const auto sd = reservoir(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_nonmarkovian(cfg, sd, Backend::volterra, window(200.0)));
  }
}
BENCHMARK(BM_Volterra)->ArgsProduct({{1, 5}, {0, 2}})->Unit(benchmark::kMillisecond);

void BM_Laplace(benchmark::State& state) {
  const auto cfg = ChainConfig::first_site_excited(static_cast<int>(state.range(0)));
  const auto sd = reservoir(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_nonmarkovian(cfg, sd, Backend::laplace, window(200.0)));
  }
}
BENCHMARK(BM_Laplace)->ArgsProduct({{1, 5}, {0, 2}})->Unit(benchmark::kMillisecond);

void BM_DeHoogScalar(benchmark::State& state) {
  InversionSettings s;
  s.method = InversionMethod::dehoog;
  for (int i = 1; i <= 256; ++i) s.t_grid.push_back(0.05 * i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_laplace([](cplx z) { return 1.0 / (z * z + 2.0 * z + 2.0); }, s));
  }
}
BENCHMARK(BM_DeHoogScalar)->Unit(benchmark::kMillisecond);

void BM_IncompleteGamma(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(0.1, 30.0), arg(-3.0, 3.0);
  std::vector<cplx> z(256);
  for (auto& v : z) v = std::polar(r(rng), arg(rng));
  for (auto _ : state) {
    for (const auto& v : z) benchmark::DoNotOptimize(upper_incomplete_gamma(-1.5, v));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(z.size()));
}
BENCHMARK(BM_IncompleteGamma);

void BM_OhmicKernelTransform(benchmark::State& state) {
  const auto k = kernel_for(presets::ohmic());
  cplx s(0.01, -20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.b_of_s(s));
    s += cplx(0.0, 1e-3);
  }
}
BENCHMARK(BM_OhmicKernelTransform);

void BM_Distance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto measure = static_cast<qsd::Measure>(state.range(1));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  auto random_state = [&] {
    CVector v(n + 1);
    for (auto& x : v) x = cplx(d(rng), d(rng));
    v /= v.norm() * 1.2;
    return CMatrix(v * v.adjoint());
  };
  const CMatrix rho = random_state(), sigma = random_state();
  for (auto _ : state) benchmark::DoNotOptimize(qsd::evaluate(measure, rho, sigma));
}
BENCHMARK(BM_Distance)->ArgsProduct({{1, 5}, {0, 1, 2}});

}  // namespace

BENCHMARK_MAIN();
