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

#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "larkms/config.hpp"
#include "larkms/model.hpp"
#include "larkms/spectrum.hpp"
#include "larkms/truncated_gamma.hpp"

namespace larkms {

/// Prior constants for one spectrum.
struct Hyperparameters {
  double nu_j = 100.0;          ///< expected number of peaks
  double lambda = 1.0;          ///< peak abundance rate
  double eps = 1.0;             ///< minimum detectable abundance
  double t0 = 0.0;              ///< TOF window start xi_a (µs)
  double t1 = 1.0;              ///< TOF window end xi_b (µs)
  double sigma2_rho = 0.1225;   ///< spread of log rho_j about log R
  double mu_r = 200.0;          ///< centre of the experiment resolution
  double sigma2_r = 0.49;       ///< spread of log R
  double a_phi = 0.25;
  double b_phi = 1.0;
  double a_s = 1.0;
  double b_s = 1.0;
  double lambda0 = 1.0;         ///< background intensity rate
  double omega0_hat = 1.0;      ///< background decay centre (µs)
  double sigma2_omega0 = 0.25;
  double gamma_fixed = 1.0;     ///< overall scale, the mean intensity

  [[nodiscard]] double window_width() const noexcept { return t1 - t0; }

  /// Throws Error(invalid_argument) naming the first bad field.
  void validate() const;
};

/// Config keys are the ones written by `hyperparameters_to_config`.
[[nodiscard]] Hyperparameters hyperparameters_from_config(const KeyValueConfig& cfg);
void hyperparameters_to_config(const Hyperparameters& h, KeyValueConfig& cfg);

// ---------------------------------------------------------------------------
// Elicitation

/// Mean-variance regression over fixed-width TOF blocks. Returns
/// (a_phi, b_phi) with a_phi = 0.25 and prior mean a_phi/b_phi equal to the
/// through-origin slope of block means on block variances.
[[nodiscard]] std::pair<double, double> elicit_phi(const Spectrum& spec, double block_width = 50.0);

/// Slope used by elicit_phi.
[[nodiscard]] double mean_variance_slope(const Spectrum& spec, double block_width = 50.0);

[[nodiscard]] double elicit_scale(const Spectrum& spec);

/// Root of x e^x E1(x) = 0.075 on (0, 1).
[[nodiscard]] double solve_lambda_eps();

/// Rate for an alpha = 0 truncated gamma with truncation `eps` and the
/// given mean. Requires mean > eps.
[[nodiscard]] double rate_for_mean(double mean, double eps);

/// (lambda, eps) with eps = 0.075 (T1 - T0)/nu_j and lambda eps = solve_lambda_eps().
[[nodiscard]] std::pair<double, double> elicit_abundance(double nu_j, double t0, double t1);

struct BackgroundEstimate {
  double omega0_hat = 0.0;
  double eta0_hat = 0.0;
  double lambda0 = 0.0;
};

/// Log-linear fit of intensity on TOF over the m/z window [mz_lo, mz_hi]
/// (mapped through the calibration), anchored at the spectrum's range start.
[[nodiscard]] BackgroundEstimate elicit_background(const Spectrum& spec, double mz_lo, double mz_hi,
                                                   const Calibration& calib, double eps);

/// Same fit over an explicit TOF window.
[[nodiscard]] BackgroundEstimate elicit_background_tof(const Spectrum& spec, double tof_lo,
                                                       double tof_hi, double eps);

/// (a_s, b_s) with b_s = 1 and prior mean 1 - mean(noise region)/mean(all).
[[nodiscard]] std::pair<double, double> elicit_signal_fraction(const Spectrum& spec, double noise_lo,
                                                               double noise_hi);

// ---------------------------------------------------------------------------
// Prior density and sampling

[[nodiscard]] double log_normal_logpdf(double x, double log_median, double variance);
[[nodiscard]] double beta_logpdf(double x, double a, double b);
[[nodiscard]] double gamma_logpdf(double x, double shape, double rate);

/// Joint prior with its normalizing constants cached. Peak terms are
/// written per peak so samplers can evaluate ratios incrementally.
class Prior {
 public:
  explicit Prior(const Hyperparameters& h);

  [[nodiscard]] const Hyperparameters& hyper() const noexcept { return h_; }

  /// log P[J = j] under the geometric law with mean nu_j.
  [[nodiscard]] double log_count(std::size_t j) const;
  [[nodiscard]] double log_location(double tau) const;
  [[nodiscard]] double log_resolution(double rho, double big_r) const;
  [[nodiscard]] double log_abundance(double eta) const;
  [[nodiscard]] double log_peak(const PeakParams& p, double big_r) const;

  [[nodiscard]] double log_experiment_resolution(double big_r) const;
  [[nodiscard]] double log_signal_fraction(double s) const;
  [[nodiscard]] double log_precision(double phi) const;
  [[nodiscard]] double log_background(const BackgroundParams& bg) const;

  /// Everything except the count and peak terms.
  [[nodiscard]] double log_global(const ModelState& state) const;
  [[nodiscard]] double log_density(const ModelState& state) const;

  [[nodiscard]] const TruncatedGamma& abundance_law() const noexcept { return abundance_; }
  [[nodiscard]] const TruncatedGamma& background_law() const noexcept { return background_; }

  template <class Rng>
  PeakParams sample_peak(Rng& rng, double big_r) const {
    std::uniform_real_distribution<double> loc(h_.t0, h_.t1);
    std::normal_distribution<double> z(0.0, 1.0);
    PeakParams p;
    p.tau = loc(rng);
    p.rho = std::exp(std::log(big_r) + std::sqrt(h_.sigma2_rho) * z(rng));
    p.eta = abundance_.sample(rng);
    return p;
  }

  template <class Rng>
  ModelState sample(Rng& rng) const {
    ModelState st;
    st.gamma = h_.gamma_fixed;
    std::geometric_distribution<long long> count(1.0 / (1.0 + h_.nu_j));
    std::normal_distribution<double> z(0.0, 1.0);
    st.big_r = std::exp(std::log(h_.mu_r) + std::sqrt(h_.sigma2_r) * z(rng));
    const auto j = count(rng);
    st.peaks.reserve(static_cast<std::size_t>(j));
    for (long long k = 0; k < j; ++k) st.peaks.push_back(sample_peak(rng, st.big_r));
    std::gamma_distribution<double> ga(h_.a_s, 1.0);
    std::gamma_distribution<double> gb(h_.b_s, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    st.s = x / (x + y);
    std::gamma_distribution<double> prec(h_.a_phi, 1.0 / h_.b_phi);
    st.phi = prec(rng);
    st.bg.omega0 = std::exp(std::log(h_.omega0_hat) + std::sqrt(h_.sigma2_omega0) * z(rng));
    st.bg.eta0 = background_.sample(rng);
    return st;
  }

 private:
  Hyperparameters h_;
  TruncatedGamma abundance_;
  TruncatedGamma background_;
  double log_count_continue_ = 0.0;  // log(nu/(1+nu))
  double log_count_stop_ = 0.0;      // log(1/(1+nu))
  double log_window_ = 0.0;
};

[[nodiscard]] double log_prior(const ModelState& state, const Hyperparameters& h);

template <class Rng>
ModelState sample_prior(Rng& rng, const Hyperparameters& h) {
  return Prior(h).sample(rng);
}

}  // namespace larkms
