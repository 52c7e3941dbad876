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

#include "larkms/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "larkms/error.hpp"
#include "larkms/initializer.hpp"

namespace larkms {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// Beta(2, 2) density 6u(1-u).
double log_beta22(double u) {
  if (!(u > 0.0 && u < 1.0)) return kNegInf;
  return std::log(6.0 * u * (1.0 - u));
}

template <class Rng>
double draw_beta22(Rng& rng) {
  std::gamma_distribution<double> g(2.0, 1.0);
  const double x = g(rng);
  const double y = g(rng);
  return x / (x + y);
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

std::string_view move_name(MoveType m) noexcept {
  switch (m) {
    case MoveType::birth: return "birth";
    case MoveType::death: return "death";
    case MoveType::update: return "update";
    case MoveType::split: return "split";
    case MoveType::merge: return "merge";
    case MoveType::fixed_dim: return "fixed_dim";
  }
  return "unknown";
}

std::string_view fixed_component_name(std::size_t i) noexcept {
  static constexpr std::array<std::string_view, 6> names = {"s",          "phi",    "R",
                                                            "joint_rho", "omega0", "eta0"};
  return i < names.size() ? names[i] : "unknown";
}

void MoveProbabilities::validate() const {
  const auto p = as_array();
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCategory::invalid_argument, "move probabilities must be non-negative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCategory::invalid_argument, "move probabilities must sum to 1");
  }
}

void ChainConfig::validate() const {
  if (n_iter <= 0) throw Error(ErrorCategory::invalid_argument, "iterations must be positive");
  if (n_burn < 0 || n_burn >= n_iter) {
    throw Error(ErrorCategory::invalid_argument, "burn-in must lie in [0, iterations)");
  }
  if (thin < 1) throw Error(ErrorCategory::invalid_argument, "thin must be at least 1");
  moves.validate();
}

long long MoveStats::total_proposed() const noexcept {
  long long total = 0;
  for (const auto& m : moves) total += m.proposed;
  return total;
}

double merge_radius(double tau, double mu_r) noexcept { return 2.0 * tau / mu_r; }

std::pair<PeakParams, PeakParams> split_peak(const PeakParams& parent, const SplitAux& u,
                                             double mu_r) {
  const double w = u.share;
  const double gap = u.spread * merge_radius(parent.tau, mu_r);
  const double log_rho = std::log(parent.rho);
  PeakParams lower;
  PeakParams upper;
  lower.eta = w * parent.eta;
  upper.eta = parent.eta - lower.eta;
  lower.tau = parent.tau - (1.0 - w) * gap;
  upper.tau = parent.tau + w * gap;
  lower.rho = std::exp(log_rho - (1.0 - w) * u.log_rho_gap);
  upper.rho = std::exp(log_rho + w * u.log_rho_gap);
  return {lower, upper};
}

std::pair<PeakParams, SplitAux> merge_peaks(const PeakParams& lower, const PeakParams& upper,
                                            double mu_r) {
  PeakParams parent;
  parent.eta = lower.eta + upper.eta;
  const double w = lower.eta / parent.eta;
  parent.tau = w * lower.tau + (1.0 - w) * upper.tau;
  const double log_lo = std::log(lower.rho);
  const double log_hi = std::log(upper.rho);
  parent.rho = std::exp(w * log_lo + (1.0 - w) * log_hi);
  SplitAux u;
  u.share = w;
  u.spread = (upper.tau - lower.tau) / merge_radius(parent.tau, mu_r);
  u.log_rho_gap = log_hi - log_lo;
  return {parent, u};
}

double log_split_jacobian(const PeakParams& parent, const PeakParams& lower, const PeakParams& upper,
                          double mu_r) {
  // eta block: eta; tau block: merge radius; log-rho block: 1, plus the
  // change from log rho to rho coordinates.
  return std::log(parent.eta) + std::log(merge_radius(parent.tau, mu_r)) + std::log(lower.rho) +
         std::log(upper.rho) - std::log(parent.rho);
}

// ---------------------------------------------------------------------------

Sampler::Sampler(const Spectrum& spec, const Hyperparameters& h, KernelKind kind, LikelihoodKind lk,
                 ChainConfig cfg)
    : spec_(spec), h_(h), prior_(h), kind_(kind), lk_(lk), cfg_(std::move(cfg)), rng_(cfg_.seed) {
  cfg_.validate();
  if (spec_.empty()) throw Error(ErrorCategory::invalid_argument, "empty spectrum");
  tau_step_ = cfg_.scales.tau >= 0.0 ? cfg_.scales.tau : 0.1 * 0.5 * (h_.t0 + h_.t1) / h_.mu_r;
  const auto y = spec_.intensity();
  y_.assign(y.begin(), y.end());
  if (lk_.model == ObservationModel::gamma) {
    const double delta = gamma_intensity_offset(spec_);
    for (auto& v : y_) v += delta;
  }
  log_y_.resize(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) log_y_[i] = y_[i] > 0.0 ? std::log(y_[i]) : kNegInf;
  f_.assign(y_.size(), 0.0);
  b_.assign(y_.size(), 0.0);
  ll_.assign(y_.size(), 0.0);
}

void Sampler::reset(ModelState state) {
  if (!is_valid(state)) throw Error(ErrorCategory::invalid_argument, "invalid initial state");
  std::sort(state.peaks.begin(), state.peaks.end(),
            [](const PeakParams& a, const PeakParams& b) { return a.tau < b.tau; });
  state_ = std::move(state);
  iteration_ = 0;
  full_recompute();
}

std::vector<double> Sampler::compute_f_grid(const std::vector<PeakParams>& peaks) const {
  std::vector<double> f(y_.size(), 0.0);
  for (const auto& p : peaks) add_peak_to(f, 0, p, 1.0, peak_window(p));
  return f;
}

void Sampler::full_recompute() {
  const auto t = spec_.tof();
  logprior_ = prior_.log_density(state_);
  if (!cfg_.use_likelihood) {
    loglik_ = 0.0;
    return;
  }
  f_ = compute_f_grid(state_.peaks);
  for (std::size_t i = 0; i < t.size(); ++i) b_[i] = background_eval(state_.bg, t[i], h_.t0);
  const double log_phi = std::log(state_.phi);
  double total = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ll_[i] = point_loglik(i, f_[i], b_[i], state_.s, state_.phi, log_phi);
    total += ll_[i];
  }
  loglik_ = total;
}

Sampler::Range Sampler::peak_window(const PeakParams& p) const {
  const auto t = spec_.tof();
  const double radius = kernel_support_radius(kind_);
  if (!std::isfinite(radius)) return {0, t.size()};
  const double omega = width_from_resolution(kind_, p.tau, p.rho);
  const double half = radius * omega;
  const auto lo = std::lower_bound(t.begin(), t.end(), p.tau - half);
  const auto hi = std::upper_bound(lo, t.end(), p.tau + half);
  return {static_cast<std::size_t>(lo - t.begin()), static_cast<std::size_t>(hi - t.begin())};
}

void Sampler::add_peak_to(std::span<double> f, std::size_t offset, const PeakParams& p, double sign,
                          Range r) const {
  const auto t = spec_.tof();
  const double omega = width_from_resolution(kind_, p.tau, p.rho);
  const double scale = sign * p.eta;
  for (std::size_t i = r.lo; i < r.hi; ++i) {
    f[i - offset] += scale * kernel_eval(kind_, t[i], p.tau, omega);
  }
}

double Sampler::point_loglik(std::size_t i, double f, double b, double s, double phi,
                             double log_phi) const {
  const double mu = state_.gamma * ((1.0 - s) + s * (f + b));
  if (lk_.model == ObservationModel::gamma) {
    if (!(mu > 0.0)) return kNegInf;
    return gamma_log_density(y_[i], log_y_[i], mu, phi, log_phi);
  }
  return normal_log_density(y_[i], mu, phi, log_phi);
}

double Sampler::stage_peak_change(std::span<const PeakParams> removed,
                                  std::span<const PeakParams> added) {
  if (!cfg_.use_likelihood) {
    staged_range_ = {0, 0};
    staged_loglik_ = 0.0;
    return 0.0;
  }
  Range r{y_.size(), 0};
  const auto widen = [&](const PeakParams& p) {
    const auto w = peak_window(p);
    if (w.lo < w.hi) {
      r.lo = std::min(r.lo, w.lo);
      r.hi = std::max(r.hi, w.hi);
    }
  };
  for (const auto& p : removed) widen(p);
  for (const auto& p : added) widen(p);
  if (r.lo >= r.hi) {
    staged_range_ = {0, 0};
    staged_loglik_ = loglik_;
    return loglik_;
  }
  staged_range_ = r;
  const std::size_t n = r.hi - r.lo;
  staged_f_.assign(f_.begin() + static_cast<std::ptrdiff_t>(r.lo),
                   f_.begin() + static_cast<std::ptrdiff_t>(r.hi));
  for (const auto& p : removed) add_peak_to(staged_f_, r.lo, p, -1.0, peak_window(p));
  for (const auto& p : added) add_peak_to(staged_f_, r.lo, p, 1.0, peak_window(p));
  staged_ll_.resize(n);
  const double log_phi = std::log(state_.phi);
  double delta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = r.lo + k;
    staged_ll_[k] = point_loglik(i, staged_f_[k], b_[i], state_.s, state_.phi, log_phi);
    delta += staged_ll_[k] - ll_[i];
  }
  staged_loglik_ = loglik_ + delta;
  if (std::isnan(staged_loglik_)) staged_loglik_ = kNegInf;
  return staged_loglik_;
}

void Sampler::commit_staged() {
  const auto r = staged_range_;
  std::copy(staged_f_.begin(), staged_f_.begin() + static_cast<std::ptrdiff_t>(r.hi - r.lo),
            f_.begin() + static_cast<std::ptrdiff_t>(r.lo));
  std::copy(staged_ll_.begin(), staged_ll_.begin() + static_cast<std::ptrdiff_t>(r.hi - r.lo),
            ll_.begin() + static_cast<std::ptrdiff_t>(r.lo));
  loglik_ = staged_loglik_;
}

double Sampler::stage_global(double s, double phi, const BackgroundParams& bg) {
  if (!cfg_.use_likelihood) {
    staged_loglik_ = 0.0;
    return 0.0;
  }
  const auto t = spec_.tof();
  const bool bg_changed = !(bg == state_.bg);
  if (bg_changed) {
    staged_b_.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) staged_b_[i] = background_eval(bg, t[i], h_.t0);
  }
  const auto& b = bg_changed ? staged_b_ : b_;
  staged_ll_.resize(t.size());
  const double log_phi = std::log(phi);
  double total = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    staged_ll_[i] = point_loglik(i, f_[i], b[i], s, phi, log_phi);
    total += staged_ll_[i];
  }
  if (!bg_changed) staged_b_.clear();
  staged_loglik_ = std::isnan(total) ? kNegInf : total;
  return staged_loglik_;
}

void Sampler::commit_global() {
  if (!cfg_.use_likelihood) return;
  if (!staged_b_.empty()) b_.swap(staged_b_);
  ll_.swap(staged_ll_);
  loglik_ = staged_loglik_;
}

double Sampler::trial_log_likelihood(std::span<const PeakParams> removed,
                                     std::span<const PeakParams> added) {
  return stage_peak_change(removed, added);
}

bool Sampler::accept(double log_ratio) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::log(unif(rng_)) < log_ratio;
}

void Sampler::insert_sorted(const PeakParams& p) {
  auto it = std::upper_bound(state_.peaks.begin(), state_.peaks.end(), p.tau,
                             [](double tau, const PeakParams& q) { return tau < q.tau; });
  state_.peaks.insert(it, p);
}

std::size_t Sampler::count_mergeable(const std::vector<PeakParams>& peaks) const {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
    const auto& a = peaks[i];
    const auto& b = peaks[i + 1];
    const double center = (a.eta * a.tau + b.eta * b.tau) / (a.eta + b.eta);
    if (b.tau - a.tau < merge_radius(center, h_.mu_r)) ++count;
  }
  return count;
}

double Sampler::log_split_aux_density(const SplitAux& u) const {
  const double var = 2.0 * h_.sigma2_rho;
  return log_beta22(u.share) + log_beta22(u.spread) - 0.5 * (kLogTwoPi + std::log(var)) -
         0.5 * u.log_rho_gap * u.log_rho_gap / var;
}

double Sampler::birth_log_ratio(double delta_loglik) const {
  const std::size_t j = state_.peaks.size();
  return delta_loglik + prior_.log_count(j + 1) - prior_.log_count(j) + safe_log(cfg_.moves.death) -
         safe_log(cfg_.moves.birth);
}

double Sampler::death_log_ratio(double delta_loglik) const {
  const std::size_t j = state_.peaks.size();
  if (j == 0) return kNegInf;
  return delta_loglik + prior_.log_count(j - 1) - prior_.log_count(j) + safe_log(cfg_.moves.birth) -
         safe_log(cfg_.moves.death);
}

double Sampler::split_log_ratio(const PeakParams& parent, const PeakParams& lower,
                                const PeakParams& upper, const SplitAux& u, double big_r,
                                std::size_t n_before, std::size_t n_mergeable_after,
                                double delta_loglik) const {
  if (n_before == 0 || n_mergeable_after == 0) return kNegInf;
  const double n = static_cast<double>(n_before);
  // Sorted-configuration density carries J!, hence the (n + 1) factor.
  const double log_target = prior_.log_count(n_before + 1) - prior_.log_count(n_before) +
                            std::log(n + 1.0) + prior_.log_peak(lower, big_r) +
                            prior_.log_peak(upper, big_r) - prior_.log_peak(parent, big_r);
  const double log_proposal = safe_log(cfg_.moves.merge) -
                              std::log(static_cast<double>(n_mergeable_after)) -
                              safe_log(cfg_.moves.split) + std::log(n) - log_split_aux_density(u);
  return delta_loglik + log_target + log_proposal + log_split_jacobian(parent, lower, upper, h_.mu_r);
}

bool Sampler::move_birth() {
  auto& st = stats_[MoveType::birth];
  ++st.proposed;
  const PeakParams newborn = prior_.sample_peak(rng_, state_.big_r);
  const std::array<PeakParams, 1> added{newborn};
  const double proposed = stage_peak_change({}, added);
  const double ratio = birth_log_ratio(proposed - loglik_);
  if (!accept(ratio)) return false;
  const std::size_t j = state_.peaks.size();
  if (cfg_.use_likelihood) commit_staged();
  logprior_ += prior_.log_count(j + 1) - prior_.log_count(j) + prior_.log_peak(newborn, state_.big_r);
  insert_sorted(newborn);
  ++st.accepted;
  return true;
}

bool Sampler::move_death() {
  auto& st = stats_[MoveType::death];
  ++st.proposed;
  const std::size_t j = state_.peaks.size();
  if (j == 0) return false;
  std::uniform_int_distribution<std::size_t> pick(0, j - 1);
  const std::size_t k = pick(rng_);
  const PeakParams victim = state_.peaks[k];
  const std::array<PeakParams, 1> removed{victim};
  const double proposed = stage_peak_change(removed, {});
  const double ratio = death_log_ratio(proposed - loglik_);
  if (!accept(ratio)) return false;
  if (cfg_.use_likelihood) commit_staged();
  logprior_ += prior_.log_count(j - 1) - prior_.log_count(j) - prior_.log_peak(victim, state_.big_r);
  state_.peaks.erase(state_.peaks.begin() + static_cast<std::ptrdiff_t>(k));
  ++st.accepted;
  return true;
}

bool Sampler::move_update_peak() {
  auto& st = stats_[MoveType::update];
  ++st.proposed;
  const std::size_t j = state_.peaks.size();
  if (j == 0) return false;
  std::uniform_int_distribution<std::size_t> pick(0, j - 1);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t k = pick(rng_);
  const PeakParams old = state_.peaks[k];
  PeakParams next = old;
  const double d_log_rho = cfg_.scales.log_rho * z(rng_);
  const double d_log_eta = cfg_.scales.log_eta * z(rng_);
  next.tau = old.tau + tau_step_ * z(rng_);
  next.rho = old.rho * std::exp(d_log_rho);
  next.eta = old.eta * std::exp(d_log_eta);
  const double lp_new = prior_.log_peak(next, state_.big_r);
  if (!std::isfinite(lp_new) || !(next.rho > 0.0) || !(next.eta > 0.0)) return false;
  const double lp_old = prior_.log_peak(old, state_.big_r);
  const std::array<PeakParams, 1> removed{old};
  const std::array<PeakParams, 1> added{next};
  const double proposed = stage_peak_change(removed, added);
  const double ratio = proposed - loglik_ + lp_new - lp_old + d_log_rho + d_log_eta;
  if (!accept(ratio)) return false;
  if (cfg_.use_likelihood) commit_staged();
  logprior_ += lp_new - lp_old;
  state_.peaks.erase(state_.peaks.begin() + static_cast<std::ptrdiff_t>(k));
  insert_sorted(next);
  ++st.accepted;
  return true;
}

bool Sampler::move_split() {
  auto& st = stats_[MoveType::split];
  ++st.proposed;
  const std::size_t j = state_.peaks.size();
  if (j == 0) return false;
  std::uniform_int_distribution<std::size_t> pick(0, j - 1);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t k = pick(rng_);
  const PeakParams parent = state_.peaks[k];
  SplitAux u;
  u.share = draw_beta22(rng_);
  u.spread = draw_beta22(rng_);
  u.log_rho_gap = std::sqrt(2.0 * h_.sigma2_rho) * z(rng_);
  const auto [lower, upper] = split_peak(parent, u, h_.mu_r);
  const double big_r = state_.big_r;
  const double lp_lower = prior_.log_peak(lower, big_r);
  const double lp_upper = prior_.log_peak(upper, big_r);
  if (!std::isfinite(lp_lower) || !std::isfinite(lp_upper)) return false;
  // The children must be adjacent so that merge can undo the move.
  if (k > 0 && !(state_.peaks[k - 1].tau < lower.tau)) return false;
  if (k + 1 < j && !(state_.peaks[k + 1].tau > upper.tau)) return false;
  std::vector<PeakParams> next;
  next.reserve(j + 1);
  next.insert(next.end(), state_.peaks.begin(), state_.peaks.begin() + static_cast<std::ptrdiff_t>(k));
  next.push_back(lower);
  next.push_back(upper);
  next.insert(next.end(), state_.peaks.begin() + static_cast<std::ptrdiff_t>(k + 1), state_.peaks.end());
  const std::size_t mergeable = count_mergeable(next);
  const std::array<PeakParams, 1> removed{parent};
  const std::array<PeakParams, 2> added{lower, upper};
  const double proposed = stage_peak_change(removed, added);
  const double ratio =
      split_log_ratio(parent, lower, upper, u, big_r, j, mergeable, proposed - loglik_);
  if (!accept(ratio)) return false;
  if (cfg_.use_likelihood) commit_staged();
  logprior_ += prior_.log_count(j + 1) - prior_.log_count(j) + lp_lower + lp_upper -
               prior_.log_peak(parent, big_r);
  state_.peaks = std::move(next);
  ++st.accepted;
  return true;
}

bool Sampler::move_merge() {
  auto& st = stats_[MoveType::merge];
  ++st.proposed;
  const std::size_t j = state_.peaks.size();
  if (j < 2) return false;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i + 1 < j; ++i) {
    const auto& a = state_.peaks[i];
    const auto& b = state_.peaks[i + 1];
    const double center = (a.eta * a.tau + b.eta * b.tau) / (a.eta + b.eta);
    if (b.tau - a.tau < merge_radius(center, h_.mu_r)) candidates.push_back(i);
  }
  if (candidates.empty()) return false;
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const std::size_t i = candidates[pick(rng_)];
  const PeakParams lower = state_.peaks[i];
  const PeakParams upper = state_.peaks[i + 1];
  const auto [parent, u] = merge_peaks(lower, upper, h_.mu_r);
  const double big_r = state_.big_r;
  const double lp_parent = prior_.log_peak(parent, big_r);
  if (!std::isfinite(lp_parent)) return false;
  const std::array<PeakParams, 2> removed{lower, upper};
  const std::array<PeakParams, 1> added{parent};
  const double proposed = stage_peak_change(removed, added);
  const double ratio = -split_log_ratio(parent, lower, upper, u, big_r, j - 1, candidates.size(),
                                        loglik_ - proposed);
  if (!accept(ratio)) return false;
  if (cfg_.use_likelihood) commit_staged();
  logprior_ += prior_.log_count(j - 1) - prior_.log_count(j) + lp_parent -
               prior_.log_peak(lower, big_r) - prior_.log_peak(upper, big_r);
  state_.peaks[i] = parent;
  state_.peaks.erase(state_.peaks.begin() + static_cast<std::ptrdiff_t>(i + 1));
  ++st.accepted;
  return true;
}

int Sampler::update_fixed_dim() {
  auto& st = stats_[MoveType::fixed_dim];
  ++st.proposed;
  auto& comp = stats_.fixed_components;
  std::normal_distribution<double> z(0.0, 1.0);
  int accepted = 0;
  const auto& sc = cfg_.scales;

  // Signal fraction on the logit scale.
  {
    ++comp[0].proposed;
    const double s = state_.s;
    if (s > 0.0 && s < 1.0) {
      const double x = std::log(s) - std::log1p(-s) + sc.logit_s * z(rng_);
      const double s_new = 1.0 / (1.0 + std::exp(-x));
      if (s_new > 0.0 && s_new < 1.0) {
        const double dprior = prior_.log_signal_fraction(s_new) - prior_.log_signal_fraction(s);
        const double jac = std::log(s_new) + std::log1p(-s_new) - std::log(s) - std::log1p(-s);
        const double proposed = stage_global(s_new, state_.phi, state_.bg);
        if (accept(proposed - loglik_ + dprior + jac)) {
          commit_global();
          logprior_ += dprior;
          state_.s = s_new;
          ++comp[0].accepted;
          ++accepted;
        }
      }
    }
  }

  // Precision, unless the Gaussian variance is held fixed.
  if (lk_.model == ObservationModel::gamma || lk_.sample_variance) {
    ++comp[1].proposed;
    const double step = sc.log_phi * z(rng_);
    const double phi_new = state_.phi * std::exp(step);
    const double dprior = prior_.log_precision(phi_new) - prior_.log_precision(state_.phi);
    const double proposed = stage_global(state_.s, phi_new, state_.bg);
    if (accept(proposed - loglik_ + dprior + step)) {
      commit_global();
      logprior_ += dprior;
      state_.phi = phi_new;
      ++comp[1].accepted;
      ++accepted;
    }
  }

  // Experiment resolution given the peak resolutions.
  {
    ++comp[2].proposed;
    const double step = sc.log_r * z(rng_);
    const double r_old = state_.big_r;
    const double r_new = r_old * std::exp(step);
    double dprior = prior_.log_experiment_resolution(r_new) - prior_.log_experiment_resolution(r_old);
    for (const auto& p : state_.peaks) {
      dprior += prior_.log_resolution(p.rho, r_new) - prior_.log_resolution(p.rho, r_old);
    }
    if (accept(dprior + step)) {
      logprior_ += dprior;
      state_.big_r = r_new;
      ++comp[2].accepted;
      ++accepted;
    }
  }

  // Common shift of log R and every log rho_j.
  if (!state_.peaks.empty()) {
    ++comp[3].proposed;
    const double step = sc.joint_log_rho * z(rng_);
    const double factor = std::exp(step);
    const double r_old = state_.big_r;
    const double r_new = r_old * factor;
    std::vector<PeakParams> next = state_.peaks;
    double dprior = prior_.log_experiment_resolution(r_new) - prior_.log_experiment_resolution(r_old);
    for (std::size_t k = 0; k < next.size(); ++k) {
      next[k].rho *= factor;
      dprior += prior_.log_resolution(next[k].rho, r_new) -
                prior_.log_resolution(state_.peaks[k].rho, r_old);
    }
    const double jac = static_cast<double>(next.size() + 1) * step;
    double proposed = 0.0;
    if (cfg_.use_likelihood) {
      staged_range_ = {0, y_.size()};
      staged_f_ = compute_f_grid(next);
      staged_ll_.resize(y_.size());
      const double log_phi = std::log(state_.phi);
      for (std::size_t i = 0; i < y_.size(); ++i) {
        staged_ll_[i] = point_loglik(i, staged_f_[i], b_[i], state_.s, state_.phi, log_phi);
        proposed += staged_ll_[i];
      }
      if (std::isnan(proposed)) proposed = kNegInf;
      staged_loglik_ = proposed;
    }
    if (accept(proposed - loglik_ + dprior + jac)) {
      if (cfg_.use_likelihood) commit_staged();
      logprior_ += dprior;
      state_.big_r = r_new;
      state_.peaks = std::move(next);
      ++comp[3].accepted;
      ++accepted;
    }
  }

  // Background decay time.
  {
    ++comp[4].proposed;
    const double step = sc.log_omega0 * z(rng_);
    BackgroundParams bg = state_.bg;
    bg.omega0 *= std::exp(step);
    const double dprior = prior_.log_background(bg) - prior_.log_background(state_.bg);
    const double proposed = stage_global(state_.s, state_.phi, bg);
    if (accept(proposed - loglik_ + dprior + step)) {
      commit_global();
      logprior_ += dprior;
      state_.bg = bg;
      ++comp[4].accepted;
      ++accepted;
    }
  }

  // Background intensity.
  {
    ++comp[5].proposed;
    const double step = sc.log_eta0 * z(rng_);
    BackgroundParams bg = state_.bg;
    bg.eta0 *= std::exp(step);
    const double dprior = prior_.log_background(bg) - prior_.log_background(state_.bg);
    if (std::isfinite(dprior)) {
      const double proposed = stage_global(state_.s, state_.phi, bg);
      if (accept(proposed - loglik_ + dprior + step)) {
        commit_global();
        logprior_ += dprior;
        state_.bg = bg;
        ++comp[5].accepted;
        ++accepted;
      }
    }
  }

  if (accepted > 0) ++st.accepted;
  return accepted;
}

MoveType Sampler::step() {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng_);
  const auto probs = cfg_.moves.as_array();
  double cum = 0.0;
  std::size_t choice = kNumMoveTypes - 1;
  for (std::size_t m = 0; m < kNumMoveTypes; ++m) {
    cum += probs[m];
    if (u < cum) {
      choice = m;
      break;
    }
  }
  // Guard against rounding in the cumulative sum landing on a zero-probability move.
  while (probs[choice] == 0.0 && choice > 0) --choice;
  const auto move = static_cast<MoveType>(choice);
  switch (move) {
    case MoveType::birth: move_birth(); break;
    case MoveType::death: move_death(); break;
    case MoveType::update: move_update_peak(); break;
    case MoveType::split: move_split(); break;
    case MoveType::merge: move_merge(); break;
    case MoveType::fixed_dim: update_fixed_dim(); break;
  }
  ++iteration_;
  if (cfg_.recompute_every > 0 && iteration_ % cfg_.recompute_every == 0) full_recompute();
  return move;
}

PosteriorSamples run_chain_from(const Spectrum& spec, const Hyperparameters& h, KernelKind kind,
                                LikelihoodKind lk, const ChainConfig& cfg, ModelState initial) {
  Sampler sampler(spec, h, kind, lk, cfg);
  sampler.reset(std::move(initial));
  if (!std::isfinite(sampler.log_posterior())) {
    throw Error(ErrorCategory::sampler, "initial state has non-finite log posterior");
  }
  PosteriorSamples out;
  out.kind = kind;
  out.xi_a = h.t0;
  out.xi_b = h.t1;
  const long long kept = (cfg.n_iter - cfg.n_burn) / cfg.thin;
  out.draws.reserve(static_cast<std::size_t>(std::max<long long>(kept, 0)));
  for (long long t = 1; t <= cfg.n_iter; ++t) {
    const auto move = sampler.step();
    if (!std::isfinite(sampler.log_posterior())) {
      throw Error(ErrorCategory::sampler, "non-finite log posterior at iteration " +
                                              std::to_string(t) + " after " +
                                              std::string(move_name(move)) + " move");
    }
    if (t > cfg.n_burn && (t - cfg.n_burn) % cfg.thin == 0) {
      out.draws.push_back({t, sampler.state(), sampler.log_posterior(), sampler.log_likelihood()});
    }
  }
  out.move_stats = sampler.stats();
  return out;
}

PosteriorSamples run_chain(const Spectrum& spec, const Hyperparameters& h, KernelKind kind,
                           LikelihoodKind lk, const ChainConfig& cfg) {
  return run_chain_from(spec, h, kind, lk, cfg, init_mode_seek(spec, h, kind));
}

}  // namespace larkms
