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

#include <cmath>
#include <fstream>

#include "larkms/error.hpp"
#include "larkms/peak_id.hpp"
#include "oracles.hpp"

namespace larkms {
namespace {

ModelState one_peak_state(double tau, double rho, double eta) {
  ModelState st;
  st.gamma = 1.0;
  st.s = 0.5;
  st.big_r = rho;
  st.bg = {1.0, 0.0};
  st.peaks = {{tau, rho, eta}};
  return st;
}

PosteriorSamples from_states(std::vector<ModelState> states, KernelKind kind, double xi_a, double xi_b,
                             std::vector<double> log_post = {}) {
  PosteriorSamples s;
  s.kind = kind;
  s.xi_a = xi_a;
  s.xi_b = xi_b;
  for (std::size_t i = 0; i < states.size(); ++i) {
    Draw d;
    d.iteration = static_cast<long long>(i + 1);
    d.state = std::move(states[i]);
    d.log_posterior = log_post.empty() ? 0.0 : log_post[i];
    s.draws.push_back(std::move(d));
  }
  return s;
}

std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

// ---------------------------------------------------------------- mean curve

TEST(MeanCurve, SingleDrawEqualsModelCurve) {
  const auto st = one_peak_state(50.0, 200.0, 2.0);
  const auto samples = from_states({st}, KernelKind::cauchy, 40.0, 60.0);
  const auto g = grid(40, 60, 401);
  const auto mu = posterior_mean_curve(samples, g, KernelKind::cauchy, false);
  const auto dmu = posterior_mean_curve(samples, g, KernelKind::cauchy, true);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(mu[i], mean_intensity(st, KernelKind::cauchy, g[i], 40.0), 1e-12);
    EXPECT_NEAR(dmu[i], mean_intensity_deriv(st, KernelKind::cauchy, g[i], 40.0), 1e-12);
  }
}

TEST(MeanCurve, AveragesDrawsLinearly) {
  const auto a = one_peak_state(48.0, 200.0, 2.0);
  const auto b = one_peak_state(52.0, 150.0, 1.0);
  const auto g = grid(40, 60, 201);
  const auto both = posterior_mean_curve(from_states({a, b}, KernelKind::gaussian, 40, 60), g,
                                         KernelKind::gaussian, false);
  const auto ca = posterior_mean_curve(from_states({a}, KernelKind::gaussian, 40, 60), g,
                                       KernelKind::gaussian, false);
  const auto cb = posterior_mean_curve(from_states({b}, KernelKind::gaussian, 40, 60), g,
                                       KernelKind::gaussian, false);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(both[i], 0.5 * (ca[i] + cb[i]), 1e-12);
}

// ---------------------------------------------------------------- HP

TEST(HighestPosterior, PicksArgmaxEarliestOnTies) {
  const auto a = one_peak_state(45.0, 200.0, 1.0);
  const auto b = one_peak_state(50.0, 200.0, 1.0);
  const auto c = one_peak_state(55.0, 200.0, 1.0);
  const auto samples = from_states({a, b, c}, KernelKind::cauchy, 40, 60, {-3.0, -1.0, -1.0});
  EXPECT_EQ(hp_index(samples), 1u);
  const Calibration calib{2.0, 1.0};
  const auto rep = hp_peaks(samples, calib, "run7");
  EXPECT_EQ(rep.method, PeakMethod::hp);
  EXPECT_EQ(rep.run_id, "run7");
  ASSERT_EQ(rep.peaks.size(), 1u);
  EXPECT_EQ(rep.peaks[0].tau, 50.0);
  EXPECT_DOUBLE_EQ(rep.peaks[0].mz, 2.0 * 49.0 * 49.0);
  EXPECT_EQ(rep.peaks[0].eta, 1.0);
  EXPECT_EQ(rep.peaks[0].rho, 200.0);
}

TEST(HighestPosterior, EmptyDrawGivesEmptyReport) {
  ModelState st = one_peak_state(50, 200, 1);
  st.peaks.clear();
  const auto rep = hp_peaks(from_states({st}, KernelKind::cauchy, 40, 60), {});
  EXPECT_TRUE(rep.peaks.empty());
}

TEST(HighestPosterior, NoDrawsIsAnError) {
  EXPECT_THROW((void)hp_index(PosteriorSamples{}), Error);
}

// ---------------------------------------------------------------- MA

TEST(ModeAveraging, SinglePeakFoundAtCentre) {
  for (auto kind : {KernelKind::cauchy, KernelKind::gaussian}) {
    const auto samples = from_states({one_peak_state(50.0, 200.0, 2.0)}, kind, 40, 60);
    const auto g = grid(40, 60, 2001);
    const auto rep = ma_peaks(samples, g, kind, {});
    ASSERT_EQ(rep.peaks.size(), 1u) << kernel_name(kind);
    EXPECT_NEAR(rep.peaks[0].tau, 50.0, 1e-4);
    EXPECT_FALSE(rep.peaks[0].eta.has_value());
    EXPECT_FALSE(rep.peaks[0].rho.has_value());
  }
}

TEST(ModeAveraging, ResolvedPairGivesTwoMergedPairGivesOne) {
  auto st = one_peak_state(50.0, 200.0, 1.0);
  st.peaks.push_back({52.0, 200.0, 1.0});  // 8 FWHM apart
  const auto g = grid(40, 60, 4001);
  EXPECT_EQ(ma_peaks(from_states({st}, KernelKind::gaussian, 40, 60), g, KernelKind::gaussian, {}).peaks.size(),
            2u);
  st.peaks[1].tau = 50.1;  // 0.4 FWHM apart: one maximum
  const auto rep = ma_peaks(from_states({st}, KernelKind::gaussian, 40, 60), g, KernelKind::gaussian, {});
  ASSERT_EQ(rep.peaks.size(), 1u);
  EXPECT_NEAR(rep.peaks[0].tau, 50.05, 1e-3);
}

TEST(ModeAveraging, InvariantUnderPositiveScaling) {
  auto st = one_peak_state(47.0, 200.0, 1.0);
  st.peaks.push_back({53.0, 120.0, 3.0});
  st.bg = {2.0, 0.5};
  auto scaled = st;
  scaled.gamma = 7.5;
  const auto g = grid(40, 60, 1001);
  const auto a = ma_peaks(from_states({st}, KernelKind::cauchy, 40, 60), g, KernelKind::cauchy, {});
  const auto b = ma_peaks(from_states({scaled}, KernelKind::cauchy, 40, 60), g, KernelKind::cauchy, {});
  ASSERT_EQ(a.peaks.size(), b.peaks.size());
  for (std::size_t i = 0; i < a.peaks.size(); ++i) EXPECT_NEAR(a.peaks[i].tau, b.peaks[i].tau, 1e-12);
}

TEST(ModeAveraging, RestrictedToWindow) {
  auto st = one_peak_state(41.0, 200.0, 1.0);
  st.peaks.push_back({50.0, 200.0, 1.0});
  const auto g = grid(30, 60, 3001);
  const auto rep = ma_peaks(from_states({st}, KernelKind::gaussian, 45, 60), g, KernelKind::gaussian, {});
  ASSERT_EQ(rep.peaks.size(), 1u);
  EXPECT_NEAR(rep.peaks[0].tau, 50.0, 1e-4);
}

TEST(ModeAveraging, RefinedGridKeepsEndpointsAndSpacing) {
  const std::vector<double> g{0.0, 1.0, 3.0};
  const auto r = refine_grid(g, 2);
  const std::vector<double> expect{0.0, 0.5, 1.0, 2.0, 3.0};
  EXPECT_EQ(r, expect);
  EXPECT_EQ(refine_grid(g, 1), g);
}

// ---------------------------------------------------------------- resolution filter

TEST(ResolutionFilter, KeepsAtOrAboveThreshold) {
  PeakReport rep;
  rep.peaks = {{40, 1000, 1.0, 150.0}, {45, 1100, 1.0, 200.0}, {50, 1200, 1.0, 250.0}};
  const auto out = filter_by_resolution(rep, 200.0);
  ASSERT_EQ(out.peaks.size(), 2u);
  EXPECT_EQ(out.peaks[0].tau, 45);
  PeakReport ma;
  ma.method = PeakMethod::ma;
  EXPECT_THROW((void)filter_by_resolution(ma, 100.0), Error);
}

// ---------------------------------------------------------------- matching

PeakReport masses(std::vector<double> mz) {
  PeakReport r;
  for (double m : mz) r.peaks.push_back({m, m, std::nullopt, std::nullopt});
  return r;
}

TEST(Matching, HalfRightHalfWrong) {
  const std::vector<double> truth{10000, 20000};
  const auto res = match_peaks(masses({10020, 15000}), truth);
  EXPECT_DOUBLE_EQ(res.tpr, 0.5);
  EXPECT_DOUBLE_EQ(res.fdr, 0.5);
  EXPECT_EQ(res.n_identified, 2u);
  EXPECT_EQ(res.n_false_positive, 1u);
  ASSERT_EQ(res.matches.size(), 2u);
  EXPECT_EQ(res.matches[0].matched_mz, 10020.0);
  EXPECT_FALSE(res.matches[1].matched_mz.has_value());
}

TEST(Matching, IdentityAndEmpty) {
  const std::vector<double> truth{5000, 8000, 12000};
  const auto same = match_peaks(masses(truth), truth);
  EXPECT_EQ(same.tpr, 1.0);
  EXPECT_EQ(same.fdr, 0.0);
  const auto none = match_peaks(masses({}), truth);
  EXPECT_EQ(none.tpr, 0.0);
  EXPECT_EQ(none.fdr, 0.0);
  const auto no_truth = match_peaks(masses({5000}), std::vector<double>{});
  EXPECT_EQ(no_truth.tpr, 0.0);
  EXPECT_EQ(no_truth.fdr, 1.0);
}

TEST(Matching, WindowEdgeIsInclusive) {
  const std::vector<double> truth{10000};
  EXPECT_EQ(match_peaks(masses({10030}), truth, 0.003).tpr, 1.0);
  EXPECT_EQ(match_peaks(masses({10031}), truth, 0.003).tpr, 0.0);
}

TEST(Matching, MonotoneInTolerance) {
  const std::vector<double> truth{4000, 7000, 9000, 15000};
  const auto id = masses({4010, 7100, 9500, 15020, 11000});
  double last_tpr = -1.0;
  double last_fdr = 2.0;
  for (double tol : {0.001, 0.003, 0.01, 0.03, 0.1}) {
    const auto r = match_peaks(id, truth, tol);
    EXPECT_GE(r.tpr, last_tpr);
    EXPECT_LE(r.fdr, last_fdr);
    last_tpr = r.tpr;
    last_fdr = r.fdr;
  }
}

// ---------------------------------------------------------------- summary and files

TEST(Summary, MomentsAndCounts) {
  auto a = one_peak_state(45, 200, 1);
  auto b = one_peak_state(50, 200, 1);
  b.peaks.push_back({55, 200, 1});
  a.s = 0.2;
  b.s = 0.4;
  const auto sum = summarize(from_states({a, b}, KernelKind::cauchy, 40, 60, {0.0, 1.0}), 3);
  EXPECT_DOUBLE_EQ(sum.s.mean, 0.3);
  EXPECT_NEAR(sum.s.sd, std::sqrt(0.02), 1e-12);  // sample sd with n - 1
  EXPECT_DOUBLE_EQ(sum.j.mean, 1.5);
  EXPECT_EQ(sum.j_hp, 2u);
  EXPECT_EQ(sum.j_dv, 3u);
  EXPECT_EQ(sum.n_draws, 2u);
}

TEST(Files, PeakReportRoundTrip) {
  const auto dir = testing::scratch_dir("peak_report");
  PeakReport hp;
  hp.run_id = "abc";
  hp.peaks = {{40.125, 1234.5, 0.75, 210.0}, {50.0, 2000.0, 1.0 / 3.0, 190.5}};
  write_peak_report(dir / "hp.csv", hp, "larkms test");
  EXPECT_EQ(read_peak_report(dir / "hp.csv"), hp);
  PeakReport ma;
  ma.method = PeakMethod::ma;
  ma.peaks = {{41.0, 1300.0, std::nullopt, std::nullopt}};
  write_peak_report(dir / "ma.csv", ma);
  EXPECT_EQ(read_peak_report(dir / "ma.csv"), ma);
}

TEST(Files, SamplesRoundTrip) {
  const auto dir = testing::scratch_dir("samples");
  auto a = one_peak_state(45.5, 201.25, 1.0 / 7.0);
  a.phi = 3.25;
  auto b = a;
  b.peaks.clear();
  b.big_r = 180.0;
  auto s = from_states({a, b}, KernelKind::gaussian, 40, 60, {-10.5, -9.25});
  s.move_stats[MoveType::birth] = {10, 3};
  write_samples(dir / "samples.csv", s, 1.0);
  const auto back = read_samples(dir / "samples.csv");
  EXPECT_EQ(back.kind, KernelKind::gaussian);
  EXPECT_EQ(back.xi_a, 40.0);
  EXPECT_EQ(back.xi_b, 60.0);
  ASSERT_EQ(back.draws.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.draws[i].state, s.draws[i].state);
    EXPECT_EQ(back.draws[i].log_posterior, s.draws[i].log_posterior);
    EXPECT_EQ(back.draws[i].iteration, s.draws[i].iteration);
  }
}

TEST(Files, MalformedReportIsSchemaError) {
  const auto dir = testing::scratch_dir("bad_report");
  std::ofstream(dir / "bad.csv") << "method,tau_us,mz_da,eta,rho\nHP,1,2,x,4\n";
  try {
    (void)read_peak_report(dir / "bad.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::schema);
  }
  EXPECT_THROW((void)read_peak_report(dir / "missing.csv"), Error);
}

}  // namespace
}  // namespace larkms
