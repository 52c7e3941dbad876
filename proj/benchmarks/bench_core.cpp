// Copyright 2026 The larkms Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "larkms/kernels.hpp"
#include "larkms/likelihood.hpp"
#include "larkms/priors.hpp"
#include "larkms/sampler.hpp"
#include "larkms/simulate.hpp"
#include "larkms/special_functions.hpp"

namespace {

using namespace larkms;

TruthSpec bench_truth() {
  TruthSpec t;
  t.grid = {30.0, 60.0, 4000};
  for (int k = 0; k < 20; ++k) t.peaks.push_back({31.0 + 1.4 * k, 250.0, 1.0 + 0.1 * k});
  t.background = BackgroundParams{3.0, 0.5};
  t.xi_a = 30.0;
  t.s = 0.7;
  t.gamma = 10.0;
  t.sigma = 0.2;
  return t;
}

void BM_ExpIntegralE1(benchmark::State& state) {
  double x = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_integral_e1(x));
    x = x < 10.0 ? x * 1.01 : 0.001;
  }
}
BENCHMARK(BM_ExpIntegralE1);

void BM_KernelEval(benchmark::State& state) {
  const auto kind = static_cast<KernelKind>(state.range(0));
  double t = 49.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_eval(kind, t, 50.0, 0.1));
    t = t < 51.0 ? t + 1e-3 : 49.0;
  }
}
BENCHMARK(BM_KernelEval)->Arg(static_cast<int>(KernelKind::cauchy))->Arg(static_cast<int>(KernelKind::gaussian));

void BM_LogLikelihood(benchmark::State& state) {
  const auto t = bench_truth();
  const auto spec = generate_spectrum(t, KernelKind::gaussian, 1).replicates[0];
  auto st = t.model_state();
  st.phi = 25.0;
  const LikelihoodKind lk{ObservationModel::gaussian, false};
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(st, KernelKind::gaussian, lk, spec, 30.0));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(spec.size()));
}
BENCHMARK(BM_LogLikelihood);

void BM_SamplerStep(benchmark::State& state) {
  const auto t = bench_truth();
  const auto spec = generate_spectrum(t, KernelKind::gaussian, 1).replicates[0];
  Hyperparameters h;
  h.t0 = 30.0;
  h.t1 = 60.0;
  h.nu_j = 20.0;
  std::tie(h.lambda, h.eps) = elicit_abundance(h.nu_j, h.t0, h.t1);
  h.mu_r = 250.0;
  h.gamma_fixed = 10.0;
  h.omega0_hat = 3.0;
  h.lambda0 = rate_for_mean(0.5, h.eps);
  h.b_phi = 0.25 * 0.04;
  ChainConfig cfg;
  Sampler s(spec, h, KernelKind::gaussian, {ObservationModel::gaussian, false}, cfg);
  auto st = t.model_state();
  st.phi = 25.0;
  s.reset(st);
  for (auto _ : state) benchmark::DoNotOptimize(s.step());
}
BENCHMARK(BM_SamplerStep);

}  // namespace

BENCHMARK_MAIN();
