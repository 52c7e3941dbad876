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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "larkms/config.hpp"
#include "larkms/error.hpp"
#include "larkms/kernels.hpp"
#include "larkms/likelihood.hpp"
#include "larkms/peak_id.hpp"
#include "larkms/priors.hpp"
#include "larkms/sampler.hpp"
#include "larkms/simulate.hpp"
#include "larkms/spectrum.hpp"

namespace larkms::cli {

[[nodiscard]] std::string_view version() noexcept;

/// Lower-case hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Process exit code for an error category (usage errors use 2).
[[nodiscard]] int exit_code(ErrorCategory c) noexcept;

/// "lo:hi" in µs.
[[nodiscard]] std::pair<double, double> parse_interval(std::string_view text);

/// Settings read from a run config, with command-line overrides applied.
struct RunConfig {
  KernelKind kernel = KernelKind::cauchy;
  ObservationModel likelihood = ObservationModel::gamma;
  bool sample_variance = false;
  std::optional<double> sigma;  ///< Gaussian noise sd; robust estimate when absent
  ChainConfig chain;
  Calibration calib;
  int n_shots = 1;
  bool standardize = true;
  int ma_refine = 1;
  std::optional<double> rho_min;
};

[[nodiscard]] RunConfig run_config_from(const KeyValueConfig& cfg);

/// Spectrum as the fit sees it: loaded, optionally standardized, clipped
/// to [T0, T1] when the config gives them.
[[nodiscard]] Spectrum prepare_spectrum(const std::filesystem::path& path, const RunConfig& rc,
                                        const KeyValueConfig& cfg);

struct ElicitOptions {
  std::filesystem::path spectrum;
  std::optional<std::filesystem::path> config;  ///< optional base config
  std::filesystem::path out;
  std::optional<double> nu_j;
  std::optional<std::pair<double, double>> noise_region;
  std::optional<std::string> likelihood;
};

/// Writes every hyperparameter with a provenance comment. Returns the config.
KeyValueConfig cmd_elicit(const ElicitOptions& opt);

struct FitOptions {
  std::filesystem::path spectrum;
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::string> kernel;
  std::optional<std::string> likelihood;
  std::optional<long long> iterations;
  std::optional<long long> burnin;
  std::optional<long long> thin;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho_min;
};

struct FitResult {
  PosteriorSamples samples;
  PeakReport hp;
  PeakReport ma;
  PosteriorSummary summary;
};

/// Output tree: samples.csv, peaks_hp.csv, peaks_ma.csv, curve_mean.csv,
/// curve_deriv.csv, summary.csv, move_stats.csv, status.txt, and
/// peaks_hp_filtered.csv when a resolution threshold is set.
FitResult cmd_fit(const FitOptions& opt);

struct SimulateOptions {
  std::filesystem::path config;  ///< truth record
  std::filesystem::path out;
  std::uint64_t seed = 1;
  std::optional<std::string> kernel;
};

/// Writes replicate_NNN.csv, mean.csv and truth.txt.
SimulationOutput cmd_simulate(const SimulateOptions& opt);

struct EvaluateOptions {
  std::filesystem::path report;
  std::filesystem::path truth;
  std::filesystem::path out;
  double tol = 0.003;
};

MatchResult cmd_evaluate(const EvaluateOptions& opt);

}  // namespace larkms::cli
