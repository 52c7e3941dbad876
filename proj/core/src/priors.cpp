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

#include "larkms/priors.hpp"

#include <boost/math/tools/roots.hpp>
#include <numbers>
#include <string>
#include <vector>

#include "larkms/error.hpp"
#include "larkms/special_functions.hpp"

namespace larkms {

namespace {

constexpr double kMinDetectableRatio = 0.075;
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

void require(bool ok, const char* field) {
  if (!ok) throw Error(ErrorCategory::invalid_argument, std::string("invalid hyperparameter: ") + field);
}

// Root of x e^x E1(x) = ratio for ratio in (0, 1).
double invert_truncation_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCategory::domain, "truncation-to-mean ratio must lie in (0, 1)");
  }
  const auto f = [ratio](double x) { return truncation_to_mean_ratio(x) - ratio; };
  double lo = ratio * 1e-3;
  while (f(lo) > 0.0) lo *= 1e-3;
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
  std::uintmax_t max_iter = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tol, max_iter);
  return 0.5 * (a + b);
}

struct BlockStats {
  double mean = 0.0;
  double variance = 0.0;
};

std::vector<BlockStats> block_stats(const Spectrum& spec, double block_width) {
  std::vector<BlockStats> out;
  const auto t = spec.tof();
  const auto y = spec.intensity();
  const double origin = spec.range_lo();
  std::size_t i = 0;
  while (i < t.size()) {
    const auto block = static_cast<long long>(std::floor((t[i] - origin) / block_width));
    std::size_t j = i;
    double sum = 0.0;
    while (j < t.size() && static_cast<long long>(std::floor((t[j] - origin) / block_width)) == block) {
      sum += y[j];
      ++j;
    }
    const auto n = static_cast<double>(j - i);
    if (j - i >= 2) {
      const double m = sum / n;
      double ss = 0.0;
      for (std::size_t k = i; k < j; ++k) ss += (y[k] - m) * (y[k] - m);
      out.push_back({m, ss / (n - 1.0)});
    }
    i = j;
  }
  return out;
}

}  // namespace

void Hyperparameters::validate() const {
  const auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(pos(nu_j), "nu_J");
  require(pos(lambda), "lambda");
  require(pos(eps), "eps");
  require(std::isfinite(t0) && std::isfinite(t1) && t0 < t1, "T0/T1");
  require(pos(sigma2_rho), "sigma2_rho");
  require(pos(mu_r), "mu_R");
  require(pos(sigma2_r), "sigma2_R");
  require(pos(a_phi), "a_phi");
  require(pos(b_phi), "b_phi");
  require(pos(a_s), "a_s");
  require(pos(b_s), "b_s");
  require(pos(lambda0), "lambda0");
  require(pos(omega0_hat), "omega0_hat");
  require(pos(sigma2_omega0), "sigma2_omega0");
  require(pos(gamma_fixed), "gamma");
}

Hyperparameters hyperparameters_from_config(const KeyValueConfig& cfg) {
  Hyperparameters h;
  h.nu_j = cfg.get_double("nu_J");
  h.lambda = cfg.get_double("lambda");
  h.eps = cfg.get_double("eps");
  h.t0 = cfg.get_double("T0");
  h.t1 = cfg.get_double("T1");
  h.sigma2_rho = cfg.get_double_or("sigma2_rho", h.sigma2_rho);
  h.mu_r = cfg.get_double_or("mu_R", h.mu_r);
  h.sigma2_r = cfg.get_double_or("sigma2_R", h.sigma2_r);
  h.a_phi = cfg.get_double_or("a_phi", h.a_phi);
  h.b_phi = cfg.get_double("b_phi");
  h.a_s = cfg.get_double("a_s");
  h.b_s = cfg.get_double_or("b_s", h.b_s);
  h.lambda0 = cfg.get_double("lambda0");
  h.omega0_hat = cfg.get_double("omega0_hat");
  h.sigma2_omega0 = cfg.get_double_or("sigma2_omega0", h.sigma2_omega0);
  h.gamma_fixed = cfg.get_double("gamma");
  h.validate();
  return h;
}

void hyperparameters_to_config(const Hyperparameters& h, KeyValueConfig& cfg) {
  cfg.set("nu_J", h.nu_j);
  cfg.set("lambda", h.lambda);
  cfg.set("eps", h.eps);
  cfg.set("T0", h.t0);
  cfg.set("T1", h.t1);
  cfg.set("sigma2_rho", h.sigma2_rho);
  cfg.set("mu_R", h.mu_r);
  cfg.set("sigma2_R", h.sigma2_r);
  cfg.set("a_phi", h.a_phi);
  cfg.set("b_phi", h.b_phi);
  cfg.set("a_s", h.a_s);
  cfg.set("b_s", h.b_s);
  cfg.set("lambda0", h.lambda0);
  cfg.set("omega0_hat", h.omega0_hat);
  cfg.set("sigma2_omega0", h.sigma2_omega0);
  cfg.set("gamma", h.gamma_fixed);
}

double mean_variance_slope(const Spectrum& spec, double block_width) {
  if (!(block_width > 0.0)) throw Error(ErrorCategory::invalid_argument, "block width must be positive");
  const auto blocks = block_stats(spec, block_width);
  if (blocks.size() < 3) {
    throw ElicitationError("b_phi", "precision elicitation needs at least 3 blocks with 2+ samples");
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& b : blocks) {
    num += b.mean * b.variance;
    den += b.variance * b.variance;
  }
  if (!(den > 0.0)) throw ElicitationError("b_phi", "block variances are all zero");
  return num / den;
}

std::pair<double, double> elicit_phi(const Spectrum& spec, double block_width) {
  const double slope = mean_variance_slope(spec, block_width);
  if (!(slope > 0.0)) {
    throw ElicitationError("b_phi", "non-positive mean-variance slope; set b_phi manually");
  }
  constexpr double a_phi = 0.25;
  return {a_phi, a_phi / slope};
}

double elicit_scale(const Spectrum& spec) {
  if (spec.empty()) throw Error(ErrorCategory::invalid_argument, "empty spectrum");
  return spec.mean_intensity();
}

double solve_lambda_eps() { return invert_truncation_ratio(kMinDetectableRatio); }

double rate_for_mean(double mean, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCategory::domain, "truncation point must be positive");
  if (!(mean > eps)) throw Error(ErrorCategory::domain, "truncated gamma mean must exceed eps");
  return invert_truncation_ratio(eps / mean) / eps;
}

std::pair<double, double> elicit_abundance(double nu_j, double t0, double t1) {
  if (!(t1 > t0)) throw Error(ErrorCategory::invalid_argument, "abundance elicitation needs T1 > T0");
  if (!(nu_j > 0.0)) throw Error(ErrorCategory::invalid_argument, "nu_J must be positive");
  const double eps = kMinDetectableRatio * (t1 - t0) / nu_j;
  return {solve_lambda_eps() / eps, eps};
}

BackgroundEstimate elicit_background_tof(const Spectrum& spec, double tof_lo, double tof_hi,
                                         double eps) {
  const auto t = spec.tof();
  const auto y = spec.intensity();
  const double delta = 1e-6 * spec.mean_intensity();
  const double origin = spec.range_lo();
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    // The background is zero at the onset itself.
    if (t[i] < tof_lo || t[i] > tof_hi || t[i] <= origin) continue;
    const double yi = y[i] + delta;
    if (!(yi > 0.0)) {
      throw ElicitationError("omega0_hat", "non-positive intensity in background window");
    }
    const double x = t[i] - origin;
    const double ly = std::log(yi);
    n += 1.0;
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
  }
  if (n < 3.0) throw ElicitationError("omega0_hat", "background window holds fewer than 3 samples");
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw ElicitationError("omega0_hat", "degenerate background window");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  if (!(slope < 0.0)) {
    throw ElicitationError("omega0_hat", "background fit shows no decay; set omega0_hat manually");
  }
  BackgroundEstimate est;
  est.omega0_hat = -1.0 / slope;
  est.eta0_hat = est.omega0_hat * std::exp(intercept);
  if (!(est.eta0_hat > eps)) {
    throw ElicitationError("lambda0", "background intensity estimate is below eps; set lambda0 manually");
  }
  est.lambda0 = rate_for_mean(est.eta0_hat, eps);
  return est;
}

BackgroundEstimate elicit_background(const Spectrum& spec, double mz_lo, double mz_hi,
                                     const Calibration& calib, double eps) {
  if (!(mz_lo < mz_hi)) throw Error(ErrorCategory::invalid_argument, "background m/z window is inverted");
  return elicit_background_tof(spec, mz_to_tof(mz_lo, calib), mz_to_tof(mz_hi, calib), eps);
}

std::pair<double, double> elicit_signal_fraction(const Spectrum& spec, double noise_lo,
                                                 double noise_hi) {
  const double overall = spec.mean_intensity();
  if (!(overall > 0.0)) throw ElicitationError("a_s", "mean intensity must be positive");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double t = spec.tof()[i];
    if (t >= noise_lo && t <= noise_hi) {
      sum += spec.intensity()[i];
      ++count;
    }
  }
  if (count == 0) throw ElicitationError("a_s", "noise region holds no samples");
  const double r = sum / static_cast<double>(count) / overall;
  if (!(r < 1.0)) throw ElicitationError("a_s", "noise-region mean is not below the overall mean");
  if (!(r > 0.0)) throw ElicitationError("a_s", "noise-region mean is zero");
  return {(1.0 - r) / r, 1.0};
}

double log_normal_logpdf(double x, double log_median, double variance) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double lx = std::log(x);
  const double d = lx - log_median;
  return -lx - 0.5 * (kLogTwoPi + std::log(variance)) - 0.5 * d * d / variance;
}

double beta_logpdf(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) return -std::numeric_limits<double>::infinity();
  double v = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  if (a != 1.0) v += (a - 1.0) * std::log(x);
  if (b != 1.0) v += (b - 1.0) * std::log1p(-x);
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

double gamma_logpdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

Prior::Prior(const Hyperparameters& h)
    : h_(h), abundance_(h.lambda, h.eps), background_(h.lambda0, h.eps) {
  h_.validate();
  log_count_continue_ = std::log(h_.nu_j / (1.0 + h_.nu_j));
  log_count_stop_ = -std::log1p(h_.nu_j);
  log_window_ = std::log(h_.window_width());
}

double Prior::log_count(std::size_t j) const {
  return log_count_stop_ + static_cast<double>(j) * log_count_continue_;
}

double Prior::log_location(double tau) const {
  if (!(tau >= h_.t0 && tau <= h_.t1)) return -std::numeric_limits<double>::infinity();
  return -log_window_;
}

double Prior::log_resolution(double rho, double big_r) const {
  return log_normal_logpdf(rho, std::log(big_r), h_.sigma2_rho);
}

double Prior::log_abundance(double eta) const { return abundance_.log_pdf(eta); }

double Prior::log_peak(const PeakParams& p, double big_r) const {
  return log_location(p.tau) + log_resolution(p.rho, big_r) + log_abundance(p.eta);
}

double Prior::log_experiment_resolution(double big_r) const {
  return log_normal_logpdf(big_r, std::log(h_.mu_r), h_.sigma2_r);
}

double Prior::log_signal_fraction(double s) const { return beta_logpdf(s, h_.a_s, h_.b_s); }

double Prior::log_precision(double phi) const { return gamma_logpdf(phi, h_.a_phi, h_.b_phi); }

double Prior::log_background(const BackgroundParams& bg) const {
  return log_normal_logpdf(bg.omega0, std::log(h_.omega0_hat), h_.sigma2_omega0) +
         background_.log_pdf(bg.eta0);
}

double Prior::log_global(const ModelState& state) const {
  return log_experiment_resolution(state.big_r) + log_signal_fraction(state.s) +
         log_precision(state.phi) + log_background(state.bg);
}

double Prior::log_density(const ModelState& state) const {
  double total = log_count(state.peaks.size()) + log_global(state);
  for (const auto& p : state.peaks) total += log_peak(p, state.big_r);
  return total;
}

double log_prior(const ModelState& state, const Hyperparameters& h) {
  return Prior(h).log_density(state);
}

}  // namespace larkms
