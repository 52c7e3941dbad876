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
#include <span>
#include <string>
#include <vector>

namespace larkms {

/// One detector record: time of flight (µs) and intensity.
struct Sample {
  double tof = 0.0;
  double intensity = 0.0;
};

/// Detector output as read from disk, before standardization.
struct RawSpectrum {
  std::vector<Sample> ticks;
  int n_shots = 1;  ///< laser shots summarized by the record
};

/// Standardized spectrum on a strictly increasing TOF grid. Values are
/// immutable after construction.
class Spectrum {
 public:
  Spectrum() = default;

  /// Range defaults to [front tof, back tof].
  Spectrum(std::vector<double> tof, std::vector<double> intensity);
  Spectrum(std::vector<double> tof, std::vector<double> intensity, double range_lo, double range_hi);

  [[nodiscard]] std::size_t size() const noexcept { return tof_.size(); }
  [[nodiscard]] bool empty() const noexcept { return tof_.empty(); }
  [[nodiscard]] std::span<const double> tof() const noexcept { return tof_; }
  [[nodiscard]] std::span<const double> intensity() const noexcept { return intensity_; }
  [[nodiscard]] double range_lo() const noexcept { return range_lo_; }
  [[nodiscard]] double range_hi() const noexcept { return range_hi_; }

  [[nodiscard]] double mean_intensity() const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  std::vector<double> tof_;
  std::vector<double> intensity_;
  double range_lo_ = 0.0;
  double range_hi_ = 0.0;
};

/// Quadratic TOF to m/z relation, m/z = u (t - t0)^2.
struct Calibration {
  double u = 1.0;   ///< Da/e per µs^2
  double t0 = 0.0;  ///< latency offset, µs

  friend bool operator==(const Calibration&, const Calibration&) = default;
};

/// Reads a two-column delimited text file (comma, tab or spaces) with an
/// optional one-line header. Lines starting with '#' are skipped.
[[nodiscard]] RawSpectrum load_spectrum(const std::filesystem::path& path, int n_shots = 1);

/// Parses the same format from an in-memory buffer; `origin` is used in
/// error messages only.
[[nodiscard]] RawSpectrum parse_spectrum(std::string_view text, int n_shots = 1,
                                         std::string_view origin = "<buffer>");

/// y = (y_obs - min y_obs) / n_shots.
[[nodiscard]] Spectrum standardize(const RawSpectrum& raw);

/// Pointwise mean over spectra sharing one TOF grid.
[[nodiscard]] Spectrum mean_spectrum(std::span<const Spectrum> spectra);

/// Keeps samples with lo <= t <= hi and sets the range to [lo, hi].
[[nodiscard]] Spectrum clip_range(const Spectrum& s, double lo, double hi);

[[nodiscard]] double tof_to_mz(double tof, const Calibration& c);
[[nodiscard]] double mz_to_tof(double mz, const Calibration& c);

/// Writes "tof,intensity" rows with round-trip precision.
void write_spectrum(const std::filesystem::path& path, const Spectrum& s,
                    const std::string& header_comment = {});

}  // namespace larkms
