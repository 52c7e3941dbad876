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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "larkms/kernels.hpp"
#include "larkms/sampler.hpp"
#include "larkms/spectrum.hpp"

namespace larkms {

enum class PeakMethod { hp, ma };

/// "HP" or "MA".
[[nodiscard]] std::string_view method_name(PeakMethod m) noexcept;
[[nodiscard]] PeakMethod parse_method(std::string_view name);

struct ReportedPeak {
  double tau = 0.0;
  double mz = 0.0;
  std::optional<double> eta;  ///< absent for MA peaks
  std::optional<double> rho;  ///< absent for MA peaks

  friend bool operator==(const ReportedPeak&, const ReportedPeak&) = default;
};

/// Identified peaks sorted by tau.
struct PeakReport {
  PeakMethod method = PeakMethod::hp;
  std::string run_id;
  std::vector<ReportedPeak> peaks;

  friend bool operator==(const PeakReport&, const PeakReport&) = default;
};

struct TruthMatch {
  double true_mz = 0.0;
  std::optional<double> matched_mz;  ///< nearest identified mass inside the window
};

struct MatchResult {
  double tpr = 0.0;
  double fdr = 0.0;
  std::size_t n_identified = 0;
  std::size_t n_false_positive = 0;
  std::vector<TruthMatch> matches;
};

/// Pointwise average over draws of mu(t), or of d mu/dt when `deriv`.
[[nodiscard]] std::vector<double> posterior_mean_curve(const PosteriorSamples& samples,
                                                       std::span<const double> grid,
                                                       KernelKind kind, bool deriv);

/// Index of the highest-posterior draw; the earliest wins ties.
[[nodiscard]] std::size_t hp_index(const PosteriorSamples& samples);

[[nodiscard]] PeakReport hp_peaks(const PosteriorSamples& samples, const Calibration& calib,
                                  std::string run_id = {});

/// Inserts `factor - 1` equally spaced points inside every grid interval.
[[nodiscard]] std::vector<double> refine_grid(std::span<const double> grid, int factor);

/// Down-crossings of the averaged derivative on `grid`, located by linear
/// interpolation and restricted to the sampler's TOF window.
[[nodiscard]] PeakReport ma_peaks(const PosteriorSamples& samples, std::span<const double> grid,
                                  KernelKind kind, const Calibration& calib,
                                  std::string run_id = {});

/// Keeps peaks with rho >= rho_min. Throws for MA reports.
[[nodiscard]] PeakReport filter_by_resolution(const PeakReport& report, double rho_min);

/// Window-membership matching with relative tolerance `tol`.
[[nodiscard]] MatchResult match_peaks(const PeakReport& identified, std::span<const double> truth_mz,
                                      double tol = 0.003);

/// Posterior means and standard deviations of the global parameters and
/// peak counts for one spectrum.
struct PosteriorSummary {
  struct Moments {
    double mean = 0.0;
    double sd = 0.0;
  };
  Moments s, phi, big_r, eta0, omega0, j;
  std::size_t j_hp = 0;
  std::size_t j_dv = 0;
  std::size_t n_draws = 0;
};

[[nodiscard]] PosteriorSummary summarize(const PosteriorSamples& samples, std::size_t j_dv);

// ---------------------------------------------------------------------------
// Files. Every writer takes a header line written as a leading '#' comment.

void write_peak_report(const std::filesystem::path& path, const PeakReport& report,
                       const std::string& header = {});
[[nodiscard]] PeakReport read_peak_report(const std::filesystem::path& path);

void write_match_result(const std::filesystem::path& path, const MatchResult& result, double tol,
                        const std::string& header = {});

void write_summary(const std::filesystem::path& path, const PosteriorSummary& summary,
                   const std::string& header = {});

/// One row per draw: iteration, log_posterior, J, s, phi, R, omega0, eta0,
/// then J (tau, rho, eta) triplets.
void write_samples(const std::filesystem::path& path, const PosteriorSamples& samples, double gamma,
                   const std::string& header = {});
[[nodiscard]] PosteriorSamples read_samples(const std::filesystem::path& path);

void write_move_stats(const std::filesystem::path& path, const MoveStats& stats,
                      const std::string& header = {});

/// Two-column "tof,value" curve.
void write_curve(const std::filesystem::path& path, std::span<const double> grid,
                 std::span<const double> values, std::string_view value_name,
                 const std::string& header = {});

}  // namespace larkms
