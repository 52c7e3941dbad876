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

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "larkms/kernels.hpp"
#include "larkms/likelihood.hpp"
#include "larkms/model.hpp"
#include "larkms/priors.hpp"
#include "larkms/spectrum.hpp"

namespace larkms {

enum class MoveType : std::size_t { birth, death, update, split, merge, fixed_dim };
inline constexpr std::size_t kNumMoveTypes = 6;

[[nodiscard]] std::string_view move_name(MoveType m) noexcept;

struct MoveProbabilities {
  double birth = 0.1;
  double death = 0.1;
  double update = 0.3;
  double split = 0.1;
  double merge = 0.1;
  double fixed_dim = 0.3;

  [[nodiscard]] std::array<double, kNumMoveTypes> as_array() const noexcept {
    return {birth, death, update, split, merge, fixed_dim};
  }
  void validate() const;
};

/// Random-walk step sizes on transformed coordinates.
struct RandomWalkScales {
  double tau = -1.0;  ///< µs; negative selects 0.1 FWHM at mu_R at the window centre
  double log_rho = 0.1;
  double log_eta = 0.1;
  double logit_s = 0.1;
  double log_phi = 0.1;
  double log_r = 0.1;
  double log_omega0 = 0.1;
  double log_eta0 = 0.1;
  double joint_log_rho = 0.1;  ///< common shift of log R and every log rho_j
};

struct ChainConfig {
  long long n_iter = 10000;
  long long n_burn = 5000;
  long long thin = 10;
  std::uint64_t seed = 1;
  MoveProbabilities moves;
  RandomWalkScales scales;
  bool use_likelihood = true;     ///< false targets the prior alone
  long long recompute_every = 1000;

  void validate() const;
};

struct MoveCounts {
  long long proposed = 0;
  long long accepted = 0;
};

struct MoveStats {
  std::array<MoveCounts, kNumMoveTypes> moves{};
  /// Fixed-dimension components: s, phi, R, joint resolution shift, omega0, eta0.
  std::array<MoveCounts, 6> fixed_components{};

  [[nodiscard]] const MoveCounts& operator[](MoveType m) const noexcept {
    return moves[static_cast<std::size_t>(m)];
  }
  [[nodiscard]] MoveCounts& operator[](MoveType m) noexcept { return moves[static_cast<std::size_t>(m)]; }
  [[nodiscard]] long long total_proposed() const noexcept;
};

[[nodiscard]] std::string_view fixed_component_name(std::size_t i) noexcept;

struct Draw {
  long long iteration = 0;
  ModelState state;
  double log_posterior = 0.0;
  double log_likelihood = 0.0;
};

struct PosteriorSamples {
  std::vector<Draw> draws;
  MoveStats move_stats;
  KernelKind kind = KernelKind::cauchy;
  double xi_a = 0.0;  ///< background onset used by every stored state
  double xi_b = 0.0;
};

/// Split auxiliaries: abundance share, separation as a fraction of the
/// merge radius, and the log-resolution gap between the children.
struct SplitAux {
  double share = 0.5;
  double spread = 0.5;
  double log_rho_gap = 0.0;
};

/// Peaks closer than this (twice the FWHM at resolution mu_r) may merge.
[[nodiscard]] double merge_radius(double tau, double mu_r) noexcept;

/// Children (lower tau first) preserving total abundance, the
/// abundance-weighted location and the abundance-weighted log resolution.
[[nodiscard]] std::pair<PeakParams, PeakParams> split_peak(const PeakParams& parent, const SplitAux& u,
                                                           double mu_r);

/// Exact inverse of split_peak; `lower.tau <= upper.tau`.
[[nodiscard]] std::pair<PeakParams, SplitAux> merge_peaks(const PeakParams& lower,
                                                          const PeakParams& upper, double mu_r);

/// log |d(children) / d(parent, aux)| in (tau, rho, eta) coordinates.
[[nodiscard]] double log_split_jacobian(const PeakParams& parent, const PeakParams& lower,
                                        const PeakParams& upper, double mu_r);

/// Reversible-jump sampler over ModelState. Peaks are kept sorted by tau;
/// the target is the posterior on sorted configurations, whose density is
/// J! times the exchangeable labelled density returned by log_prior.
class Sampler {
 public:
  Sampler(const Spectrum& spec, const Hyperparameters& h, KernelKind kind, LikelihoodKind lk,
          ChainConfig cfg);

  /// Installs a state and rebuilds every cached grid quantity.
  void reset(ModelState state);

  /// One iteration: draws a move type from the configured probabilities.
  MoveType step();

  bool move_birth();
  bool move_death();
  bool move_update_peak();
  bool move_split();
  bool move_merge();
  /// Returns the number of accepted components.
  int update_fixed_dim();

  /// Rebuilds grids and totals from the current state.
  void full_recompute();

  [[nodiscard]] const ModelState& state() const noexcept { return state_; }
  [[nodiscard]] double log_likelihood() const noexcept { return loglik_; }
  /// Labelled-density prior (matches larkms::log_prior).
  [[nodiscard]] double log_prior() const noexcept { return logprior_; }
  [[nodiscard]] double log_posterior() const noexcept { return loglik_ + logprior_; }
  [[nodiscard]] const MoveStats& stats() const noexcept { return stats_; }
  [[nodiscard]] const Prior& prior() const noexcept { return prior_; }
  [[nodiscard]] const ChainConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] std::mt19937_64& rng() noexcept { return rng_; }
  [[nodiscard]] double tau_step() const noexcept { return tau_step_; }

  /// log acceptance ratio of adding `newborn` to the current state, given
  /// the log-likelihood change it causes.
  [[nodiscard]] double birth_log_ratio(double delta_loglik) const;
  /// log acceptance ratio of deleting one of the current peaks.
  [[nodiscard]] double death_log_ratio(double delta_loglik) const;

  /// log acceptance ratio of replacing `parent` (one of `n_before` peaks)
  /// with children, where `n_mergeable_after` counts mergeable adjacent
  /// pairs in the resulting configuration.
  [[nodiscard]] double split_log_ratio(const PeakParams& parent, const PeakParams& lower,
                                       const PeakParams& upper, const SplitAux& u, double big_r,
                                       std::size_t n_before, std::size_t n_mergeable_after,
                                       double delta_loglik) const;

  /// Log-likelihood of the current state with `removed` peaks taken out and
  /// `added` peaks put in. Does not modify the state.
  [[nodiscard]] double trial_log_likelihood(std::span<const PeakParams> removed,
                                            std::span<const PeakParams> added);

 private:
  struct Range {
    std::size_t lo = 0;
    std::size_t hi = 0;
  };

  [[nodiscard]] Range peak_window(const PeakParams& p) const;
  void add_peak_to(std::span<double> f, std::size_t offset, const PeakParams& p, double sign,
                   Range r) const;
  [[nodiscard]] double point_loglik(std::size_t i, double f, double b, double s, double phi,
                                    double log_phi) const;
  /// Stages a peak change and returns the proposed total log-likelihood.
  double stage_peak_change(std::span<const PeakParams> removed, std::span<const PeakParams> added);
  void commit_staged();
  /// Stages a change of the global parameters that act on every grid point.
  double stage_global(double s, double phi, const BackgroundParams& bg);
  void commit_global();

  [[nodiscard]] std::size_t count_mergeable(const std::vector<PeakParams>& peaks) const;
  [[nodiscard]] double log_split_aux_density(const SplitAux& u) const;
  void insert_sorted(const PeakParams& p);
  [[nodiscard]] bool accept(double log_ratio);
  [[nodiscard]] std::vector<double> compute_f_grid(const std::vector<PeakParams>& peaks) const;

  Spectrum spec_;
  Hyperparameters h_;
  Prior prior_;
  KernelKind kind_;
  LikelihoodKind lk_;
  ChainConfig cfg_;
  std::mt19937_64 rng_;
  double tau_step_ = 0.0;

  ModelState state_;
  std::vector<double> y_;      // intensities (offset applied for the gamma law)
  std::vector<double> log_y_;
  std::vector<double> f_;      // signature on the grid
  std::vector<double> b_;      // background on the grid
  std::vector<double> ll_;     // pointwise log-likelihood
  double loglik_ = 0.0;
  double logprior_ = 0.0;
  long long iteration_ = 0;

  Range staged_range_;
  std::vector<double> staged_f_;
  std::vector<double> staged_b_;
  std::vector<double> staged_ll_;
  double staged_loglik_ = 0.0;

  MoveStats stats_;
};

/// Runs init_mode_seek, then cfg.n_iter iterations; stores every thin-th
/// post-burn-in state.
[[nodiscard]] PosteriorSamples run_chain(const Spectrum& spec, const Hyperparameters& h,
                                         KernelKind kind, LikelihoodKind lk, const ChainConfig& cfg);

/// Same, from a caller-supplied initial state.
[[nodiscard]] PosteriorSamples run_chain_from(const Spectrum& spec, const Hyperparameters& h,
                                              KernelKind kind, LikelihoodKind lk,
                                              const ChainConfig& cfg, ModelState initial);

}  // namespace larkms
