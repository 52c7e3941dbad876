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
#include <vector>

#include "larkms/config.hpp"
#include "larkms/kernels.hpp"
#include "larkms/model.hpp"
#include "larkms/spectrum.hpp"

namespace larkms {

enum class NoiseLaw { gamma, gaussian };

/// Uniform TOF grid.
struct GridSpec {
  double tof_lo = 0.0;
  double tof_hi = 1.0;
  std::size_t n_points = 2;

  [[nodiscard]] double spacing() const noexcept {
    return (tof_hi - tof_lo) / static_cast<double>(n_points - 1);
  }
  [[nodiscard]] std::vector<double> points() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Ground truth for a synthetic spectrum.
struct TruthSpec {
  std::vector<PeakParams> peaks;
  std::optional<BackgroundParams> background;
  double xi_a = 0.0;  ///< background onset
  double s = 0.5;
  double gamma = 1.0;
  NoiseLaw noise = NoiseLaw::gaussian;
  double phi = 1.0;    ///< gamma-law precision
  double sigma = 0.0;  ///< Gaussian noise sd
  GridSpec grid;
  int n_replicates = 1;
  Calibration calib;

  /// Throws Error(invalid_argument) naming the first bad field.
  void validate() const;
  /// The ModelState whose mean curve generates the data.
  [[nodiscard]] ModelState model_state() const;
  /// Peak masses through the calibration.
  [[nodiscard]] std::vector<double> masses() const;

  friend bool operator==(const TruthSpec&, const TruthSpec&) = default;
};

struct SimulationOutput {
  std::vector<Spectrum> replicates;
  std::size_t n_floored = 0;  ///< Gaussian draws raised to zero
  std::size_t n_values = 0;

  [[nodiscard]] double floored_fraction() const noexcept {
    return n_values == 0 ? 0.0 : static_cast<double>(n_floored) / static_cast<double>(n_values);
  }
};

/// Replicate r draws from an mt19937_64 seeded by seed_seq{seed, r}.
[[nodiscard]] SimulationOutput generate_spectrum(const TruthSpec& truth, KernelKind kind,
                                                 std::uint64_t seed);

[[nodiscard]] Spectrum mean_of_replicates(const SimulationOutput& out);

/// Truth record as key = value text. Peaks are `peak.K = tau rho eta`;
/// input files may give `peak_mz.K = mz rho eta` instead.
[[nodiscard]] KeyValueConfig truth_to_config(const TruthSpec& truth);
[[nodiscard]] TruthSpec truth_from_config(const KeyValueConfig& cfg);

void write_truth_record(const std::filesystem::path& path, const TruthSpec& truth,
                        const std::string& header = {});
[[nodiscard]] TruthSpec read_truth_record(const std::filesystem::path& path);

}  // namespace larkms
