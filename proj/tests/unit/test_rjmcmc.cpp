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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "larkms/error.hpp"
#include "larkms/initializer.hpp"
#include "larkms/likelihood.hpp"
#include "larkms/priors.hpp"
#include "larkms/sampler.hpp"
#include "larkms/simulate.hpp"
#include "oracles.hpp"

namespace larkms {
namespace {

constexpr LikelihoodKind kNormal{ObservationModel::gaussian, false};
constexpr LikelihoodKind kGamma{ObservationModel::gamma, false};

Hyperparameters window_prior(double t0, double t1, double nu) {
  Hyperparameters h;
  h.nu_j = nu;
  h.t0 = t0;
  h.t1 = t1;
  std::tie(h.lambda, h.eps) = elicit_abundance(nu, t0, t1);
  h.b_phi = 1.0;
  h.a_s = 2.0;
  h.lambda0 = rate_for_mean(5.0 * h.eps, h.eps);
  h.omega0_hat = 5.0;
  h.gamma_fixed = 1.0;
  return h;
}

Spectrum flat_spectrum(double t0, double t1, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * i / (n - 1);
  return Spectrum(t, std::vector<double>(n, 1.0));
}

ModelState prior_start(const Hyperparameters& h) {
  ModelState st;
  st.gamma = h.gamma_fixed;
  st.s = 0.5;
  st.phi = h.a_phi / h.b_phi;
  st.big_r = h.mu_r;
  st.bg = {h.omega0_hat, 2.0 * h.eps};
  return st;
}

/// Single Gaussian peak on a flat floor, observed with small Gaussian noise.
struct SinglePeakData {
  TruthSpec truth;
  Spectrum spec;
  Hyperparameters h;
};

SinglePeakData single_peak(double sigma, std::uint64_t seed) {
  SinglePeakData d;
  auto& t = d.truth;
  t.grid = {40.0, 60.0, 1000};
  t.peaks = {{50.0, 200.0, 2.0}};
  t.s = 0.5;
  t.gamma = 2.0;
  t.noise = NoiseLaw::gaussian;
  t.sigma = sigma;
  t.background = BackgroundParams{1.0, 0.02};
  t.xi_a = 40.0;
  d.spec = generate_spectrum(t, KernelKind::gaussian, seed).replicates.front();
  d.h = window_prior(40.0, 60.0, 3.0);
  d.h.gamma_fixed = 2.0;
  d.h.a_s = 1.0;  // prior mean 0.5 matches the truth
  d.h.omega0_hat = 1.0;
  d.h.lambda0 = rate_for_mean(2.0 * d.h.eps, d.h.eps);
  d.h.b_phi = sigma > 0 ? d.h.a_phi * sigma * sigma : 1.0;
  return d;
}

// ---------------------------------------------------------------- split/merge algebra

TEST(SplitMerge, MergeInvertsSplit) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const PeakParams parent{20 + 100 * u(rng), 50 + 400 * u(rng), 0.1 + 10 * u(rng)};
    const SplitAux aux{0.01 + 0.98 * u(rng), 0.01 + 0.98 * u(rng), 0.5 * z(rng)};
    const auto [lo, hi] = split_peak(parent, aux, 200.0);
    EXPECT_LT(lo.tau, hi.tau);
    const auto [back, aux2] = merge_peaks(lo, hi, 200.0);
    EXPECT_NEAR(back.eta, parent.eta, 1e-12 * parent.eta);
    EXPECT_NEAR(back.tau, parent.tau, 1e-12 * parent.tau);
    EXPECT_NEAR(back.rho, parent.rho, 1e-12 * parent.rho);
    EXPECT_NEAR(aux2.share, aux.share, 1e-12);
    EXPECT_NEAR(aux2.spread, aux.spread, 1e-9);
    EXPECT_NEAR(aux2.log_rho_gap, aux.log_rho_gap, 1e-9);
    EXPECT_DOUBLE_EQ(lo.eta + hi.eta, parent.eta);
  }
}

TEST(SplitMerge, JacobianMatchesFiniteDifferenceDeterminant) {
  // Map (tau, rho, eta, u1, u2, u3) -> (tau_a, rho_a, eta_a, tau_b, rho_b, eta_b).
  const auto map = [](const Eigen::Matrix<double, 6, 1>& x) {
    const auto [a, b] = split_peak({x(0), x(1), x(2)}, {x(3), x(4), x(5)}, 180.0);
    Eigen::Matrix<double, 6, 1> y;
    y << a.tau, a.rho, a.eta, b.tau, b.rho, b.eta;
    return y;
  };
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix<double, 6, 1> x;
    x << 30 + 60 * u(rng), 100 + 300 * u(rng), 0.5 + 5 * u(rng), u(rng), u(rng), u(rng) - 0.5;
    Eigen::Matrix<double, 6, 6> jac;
    for (int k = 0; k < 6; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
      auto xp = x;
      auto xm = x;
      xp(k) += h;
      xm(k) -= h;
      jac.col(k) = (map(xp) - map(xm)) / (2 * h);
    }
    const PeakParams parent{x(0), x(1), x(2)};
    const auto [a, b] = split_peak(parent, {x(3), x(4), x(5)}, 180.0);
    const double fd = std::log(std::abs(jac.determinant()));
    EXPECT_NEAR(log_split_jacobian(parent, a, b, 180.0), fd, 1e-5);
  }
}

TEST(SplitMerge, MergeRadiusIsTwoFwhmAtMuR) { EXPECT_DOUBLE_EQ(merge_radius(100.0, 200.0), 1.0); }

// ---------------------------------------------------------------- acceptance ratios

TEST(Ratios, BirthTimesMatchedDeathIsOne) {
  const auto h = window_prior(10, 50, 8);
  const auto spec = flat_spectrum(10, 50, 50);
  ChainConfig cfg;
  cfg.use_likelihood = false;
  Sampler s(spec, h, KernelKind::cauchy, kGamma, cfg);
  auto st = prior_start(h);
  st.peaks = {{20, 180, 3 * h.eps}, {30, 220, 2 * h.eps}};
  s.reset(st);
  const double birth = s.birth_log_ratio(0.37);
  st.peaks.push_back({40, 200, 4 * h.eps});
  s.reset(st);
  const double death = s.death_log_ratio(-0.37);
  EXPECT_NEAR(birth + death, 0.0, 1e-14);
}

TEST(Ratios, DeathOnEmptyIsRejected) {
  const auto h = window_prior(10, 50, 8);
  ChainConfig cfg;
  cfg.use_likelihood = false;
  Sampler s(flat_spectrum(10, 50, 50), h, KernelKind::cauchy, kGamma, cfg);
  s.reset(prior_start(h));
  EXPECT_FALSE(s.move_death());
  EXPECT_EQ(s.stats()[MoveType::death].proposed, 1);
  EXPECT_EQ(s.stats()[MoveType::death].accepted, 0);
  EXPECT_FALSE(s.move_merge());
  EXPECT_FALSE(s.move_split());
  EXPECT_FALSE(s.move_update_peak());
}

// ---------------------------------------------------------------- update move

TEST(UpdateMove, ZeroStepsAlwaysAcceptedStateUnchanged) {
  auto d = single_peak(0.05, 3);
  ChainConfig cfg;
  cfg.scales.tau = 0.0;
  cfg.scales.log_rho = 0.0;
  cfg.scales.log_eta = 0.0;
  Sampler s(d.spec, d.h, KernelKind::gaussian, kNormal, cfg);
  auto st = prior_start(d.h);
  st.gamma = 2.0;
  st.phi = 400.0;
  st.peaks = {{50.01, 190.0, 1.9}, {55.0, 210.0, 0.8}};
  s.reset(st);
  const auto before = s.state();
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(s.move_update_peak());
  EXPECT_EQ(s.state(), before);
}

TEST(UpdateMove, OutOfWindowProposalsRejected) {
  const auto h = window_prior(10, 50, 8);
  ChainConfig cfg;
  cfg.use_likelihood = false;
  cfg.scales.tau = 1e6;  // essentially every proposal leaves [T0, T1]
  Sampler s(flat_spectrum(10, 50, 50), h, KernelKind::cauchy, kGamma, cfg);
  auto st = prior_start(h);
  st.peaks = {{49.9, 200, 3 * h.eps}};
  s.reset(st);
  int accepted = 0;
  for (int i = 0; i < 500; ++i) accepted += s.move_update_peak();
  EXPECT_EQ(accepted, 0);
  EXPECT_EQ(s.state().peaks[0].tau, 49.9);
}

TEST(UpdateMove, ConcentratesOnSharpPeak) {
  auto d = single_peak(0.02, 5);
  ChainConfig cfg;
  cfg.n_iter = 10000;
  cfg.n_burn = 2000;
  cfg.thin = 10;
  cfg.seed = 9;
  const auto out = run_chain(d.spec, d.h, KernelKind::gaussian, kNormal, cfg);
  const double fwhm = 50.0 / 200.0;
  double sum = 0.0;
  int count = 0;
  for (const auto& dr : out.draws) {
    for (const auto& p : dr.state.peaks) {
      if (std::abs(p.tau - 50.0) < 2.0 && p.eta > 0.5) {
        sum += p.tau;
        ++count;
      }
    }
  }
  ASSERT_GT(count, 0);
  EXPECT_LT(std::abs(sum / count - 50.0), fwhm / 2);
}

// ---------------------------------------------------------------- fixed-dimension updates

TEST(FixedDim, PrecisionPosteriorOnFlatGammaData) {
  const double phi = 2.0;
  const double mean = 3.0;
  std::mt19937_64 rng(77);
  std::gamma_distribution<double> g(phi * mean, 1.0 / phi);
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 0; i < 5000; ++i) {
    t.push_back(100.0 + 0.2 * i);
    y.push_back(g(rng));
  }
  const Spectrum spec(t, y);
  auto h = window_prior(100.0, 1100.0, 1.0);
  h.gamma_fixed = spec.mean_intensity();
  h.a_s = 0.3;
  h.b_s = 1.0;
  h.omega0_hat = 1.0;
  h.lambda0 = rate_for_mean(1.5 * h.eps, h.eps);
  ChainConfig cfg;
  cfg.n_iter = 50000;
  cfg.n_burn = 10000;
  cfg.thin = 10;
  cfg.moves = {0, 0, 0, 0, 0, 1};
  auto st = prior_start(h);
  st.s = 0.05;
  st.phi = 1.0;
  st.bg = {1.0, 1.2 * h.eps};
  const auto out = run_chain_from(spec, h, KernelKind::cauchy, kGamma, cfg, st);
  double sum = 0.0;
  for (const auto& d : out.draws) sum += d.state.phi;
  EXPECT_NEAR(sum / out.draws.size(), phi, 0.1 * phi);
}

TEST(FixedDim, SignalFractionStaysInSupport) {
  auto h = window_prior(10, 50, 3);
  ChainConfig cfg;
  cfg.use_likelihood = false;
  cfg.scales.logit_s = 5.0;
  Sampler s(flat_spectrum(10, 50, 30), h, KernelKind::cauchy, kGamma, cfg);
  s.reset(prior_start(h));
  for (int i = 0; i < 5000; ++i) {
    s.update_fixed_dim();
    ASSERT_GT(s.state().s, 0.0);
    ASSERT_LT(s.state().s, 1.0);
  }
}

TEST(FixedDim, ResolutionFollowsPriorWithoutPeaks) {
  auto h = window_prior(10, 50, 3);
  h.gamma_fixed = 1.0;
  ChainConfig cfg;
  cfg.n_iter = 100000;
  cfg.n_burn = 1000;
  cfg.thin = 1;
  cfg.moves = {0, 0, 0, 0, 0, 1};
  cfg.scales.log_r = 1.0;
  auto st = prior_start(h);
  const auto out = run_chain_from(flat_spectrum(10, 50, 30), h, KernelKind::cauchy, kGamma, cfg, st);
  std::vector<double> log_r;
  for (const auto& d : out.draws) {
    ASSERT_TRUE(d.state.peaks.empty());
    log_r.push_back(std::log(d.state.big_r));
  }
  const double ess = testing::effective_sample_size(log_r);
  const double sd = std::sqrt(h.sigma2_r);
  const double p = testing::ks_pvalue(
      log_r, [&](double x) { return testing::normal_cdf(x, std::log(h.mu_r), sd); }, ess);
  EXPECT_GT(p, 0.01) << "ess " << ess;
}

// ---------------------------------------------------------------- prior recovery

std::vector<double> geometric_probs(double nu, std::size_t bins) {
  std::vector<double> p(bins);
  double tail = 1.0;
  for (std::size_t j = 0; j + 1 < bins; ++j) {
    p[j] = std::pow(nu / (1 + nu), static_cast<double>(j)) / (1 + nu);
    tail -= p[j];
  }
  p.back() = tail;
  return p;
}

double count_pvalue(const PosteriorSamples& out, double nu) {
  const std::size_t bins = 8 * static_cast<std::size_t>(nu) + 2;
  std::vector<double> counts(bins, 0.0);
  std::vector<double> js;
  for (const auto& d : out.draws) {
    const auto j = d.state.peaks.size();
    counts[std::min(j, bins - 1)] += 1.0;
    js.push_back(static_cast<double>(j));
  }
  return testing::chi_square_pvalue(counts, geometric_probs(nu, bins), testing::effective_sample_size(js));
}

TEST(PriorRecovery, BirthDeathOnlyRecoversGeometric) {
  const double nu = 5.0;
  const auto h = window_prior(10, 50, nu);
  ChainConfig cfg;
  cfg.n_iter = 100000;
  cfg.n_burn = 1000;
  cfg.thin = 1;
  cfg.use_likelihood = false;
  cfg.moves = {0.5, 0.5, 0, 0, 0, 0};
  const auto out = run_chain_from(flat_spectrum(10, 50, 20), h, KernelKind::cauchy, kGamma, cfg,
                                  prior_start(h));
  EXPECT_GT(count_pvalue(out, nu), 0.01);
}

TEST(PriorRecovery, FullMoveSetRecoversMarginals) {
  const double nu = 5.0;
  const auto h = window_prior(10, 50, nu);
  ChainConfig cfg;
  cfg.n_iter = 100000;
  cfg.n_burn = 1000;
  cfg.thin = 1;
  cfg.use_likelihood = false;
  cfg.scales.log_r = 0.5;
  cfg.scales.joint_log_rho = 0.5;
  cfg.scales.logit_s = 1.5;
  const auto out = run_chain_from(flat_spectrum(10, 50, 20), h, KernelKind::cauchy, kGamma, cfg,
                                  prior_start(h));
  EXPECT_GT(count_pvalue(out, nu), 0.01);
  EXPECT_GT(out.move_stats[MoveType::split].accepted, 0);
  EXPECT_GT(out.move_stats[MoveType::merge].accepted, 0);

  std::vector<double> log_r;
  std::vector<double> s;
  for (const auto& d : out.draws) {
    log_r.push_back(std::log(d.state.big_r));
    s.push_back(d.state.s);
  }
  const double p_r = testing::ks_pvalue(
      log_r, [&](double x) { return testing::normal_cdf(x, std::log(h.mu_r), std::sqrt(h.sigma2_r)); },
      testing::effective_sample_size(log_r));
  EXPECT_GT(p_r, 0.01);
  // Beta(2, 1) CDF is s^2.
  const double p_s =
      testing::ks_pvalue(s, [](double x) { return x * x; }, testing::effective_sample_size(s));
  EXPECT_GT(p_s, 0.01);
}

// ---------------------------------------------------------------- chain contracts

TEST(RunChain, DeterministicAndAccounted) {
  auto d = single_peak(0.05, 11);
  ChainConfig cfg;
  cfg.n_iter = 3000;
  cfg.n_burn = 1000;
  cfg.thin = 7;
  cfg.seed = 42;
  const auto a = run_chain(d.spec, d.h, KernelKind::gaussian, kNormal, cfg);
  const auto b = run_chain(d.spec, d.h, KernelKind::gaussian, kNormal, cfg);
  ASSERT_EQ(a.draws.size(), b.draws.size());
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    EXPECT_EQ(a.draws[i].iteration, b.draws[i].iteration);
    EXPECT_EQ(a.draws[i].state, b.draws[i].state);
    EXPECT_EQ(a.draws[i].log_posterior, b.draws[i].log_posterior);
  }
  EXPECT_EQ(a.move_stats.total_proposed(), cfg.n_iter);
  EXPECT_EQ(a.draws.size(), static_cast<std::size_t>((cfg.n_iter - cfg.n_burn) / cfg.thin));
  for (std::size_t i = 1; i < a.draws.size(); ++i) EXPECT_GT(a.draws[i].iteration, a.draws[i - 1].iteration);
}

TEST(RunChain, StoredPosteriorRecomputes) {
  for (auto lk : {kNormal, kGamma}) {
    auto d = single_peak(0.05, 13);
    if (lk.model == ObservationModel::gamma) d.h.b_phi = 0.25 / 400.0;
    ChainConfig cfg;
    cfg.n_iter = 5000;
    cfg.n_burn = 0;
    cfg.thin = 25;
    cfg.recompute_every = 0;  // worst case: no periodic refresh
    const auto out = run_chain(d.spec, d.h, KernelKind::gaussian, lk, cfg);
    for (const auto& dr : out.draws) {
      const double direct = log_likelihood(dr.state, KernelKind::gaussian, lk, d.spec, d.h.t0) +
                            log_prior(dr.state, d.h);
      EXPECT_NEAR(dr.log_posterior, direct, 1e-8) << likelihood_name(lk.model);
    }
  }
}

TEST(RunChain, RejectedProposalsLeaveStateUnchanged) {
  auto d = single_peak(0.05, 17);
  ChainConfig cfg;
  Sampler s(d.spec, d.h, KernelKind::gaussian, kNormal, cfg);
  s.reset(init_mode_seek(d.spec, d.h, KernelKind::gaussian));
  for (int i = 0; i < 3000; ++i) {
    const auto before = s.state();
    const auto stats_before = s.stats();
    const auto move = s.step();
    if (s.stats()[move].accepted == stats_before[move].accepted) {
      ASSERT_EQ(s.state(), before) << move_name(move);
    }
  }
}

TEST(RunChain, RejectsInvalidConfig) {
  ChainConfig cfg;
  cfg.n_burn = cfg.n_iter;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.thin = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.moves.birth = 0.5;
  EXPECT_THROW(cfg.validate(), Error);
}

// ---------------------------------------------------------------- initializer

TEST(Initializer, RecoversNoiselessSingleKernel) {
  auto d = single_peak(0.0, 1);
  const auto st = init_mode_seek(d.spec, d.h, KernelKind::gaussian);
  ASSERT_EQ(st.peaks.size(), 1u);
  const double step = d.truth.grid.spacing();
  EXPECT_LE(std::abs(st.peaks[0].tau - 50.0), step);
  EXPECT_NEAR(st.peaks[0].eta, 2.0, 0.2);
  EXPECT_EQ(st.big_r, d.h.mu_r);
  EXPECT_EQ(st.s, 0.5);
}

TEST(Initializer, FlatSpectrumHasNoPeaks) {
  auto h = window_prior(10, 50, 5);
  h.a_s = 1.0;
  const auto st = init_mode_seek(flat_spectrum(10, 50, 500), h, KernelKind::cauchy);
  EXPECT_TRUE(st.peaks.empty());
}

TEST(Initializer, Deterministic) {
  auto d = single_peak(0.1, 4);
  EXPECT_EQ(init_mode_seek(d.spec, d.h, KernelKind::gaussian), init_mode_seek(d.spec, d.h, KernelKind::gaussian));
}

TEST(Initializer, NnlsMatchesUnconstrainedWhenInterior) {
  // Columns e1 + e2, e2, e3 with a right-hand side that has a positive solution.
  const std::vector<double> a{1, 1, 0, 0, 1, 0, 0, 0, 1};
  const std::vector<double> r{2, 5, 1};
  const auto x = nonnegative_least_squares(a, 3, r);
  EXPECT_NEAR(x[0], 2, 1e-9);
  EXPECT_NEAR(x[1], 3, 1e-9);
  EXPECT_NEAR(x[2], 1, 1e-9);
  const std::vector<double> neg{-1, -1, -1};
  for (double v : nonnegative_least_squares(a, 3, neg)) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace larkms
