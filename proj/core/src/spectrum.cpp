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

#include "larkms/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "larkms/error.hpp"
#include "larkms/text_io.hpp"

namespace larkms {

namespace {

void check_grid(std::span<const double> tof) {
  for (std::size_t i = 0; i < tof.size(); ++i) {
    if (!std::isfinite(tof[i])) {
      throw Error(ErrorCategory::invalid_argument, "non-finite TOF at index " + std::to_string(i));
    }
    if (i > 0 && !(tof[i] > tof[i - 1])) {
      throw Error(ErrorCategory::invalid_argument,
                  "TOF grid is not strictly increasing at index " + std::to_string(i));
    }
  }
}

}  // namespace

Spectrum::Spectrum(std::vector<double> tof, std::vector<double> intensity)
    : tof_(std::move(tof)), intensity_(std::move(intensity)) {
  if (tof_.size() != intensity_.size()) {
    throw Error(ErrorCategory::invalid_argument, "TOF and intensity lengths differ");
  }
  check_grid(tof_);
  if (!tof_.empty()) {
    range_lo_ = tof_.front();
    range_hi_ = tof_.back();
  }
}

Spectrum::Spectrum(std::vector<double> tof, std::vector<double> intensity, double range_lo,
                   double range_hi)
    : Spectrum(std::move(tof), std::move(intensity)) {
  if (!(range_lo <= range_hi)) {
    throw Error(ErrorCategory::invalid_argument, "spectrum range is inverted");
  }
  if (!tof_.empty() && (tof_.front() < range_lo || tof_.back() > range_hi)) {
    throw Error(ErrorCategory::invalid_argument, "grid extends outside the spectrum range");
  }
  range_lo_ = range_lo;
  range_hi_ = range_hi;
}

double Spectrum::mean_intensity() const {
  if (intensity_.empty()) return 0.0;
  return std::accumulate(intensity_.begin(), intensity_.end(), 0.0) /
         static_cast<double>(intensity_.size());
}

RawSpectrum parse_spectrum(std::string_view text, int n_shots, std::string_view origin) {
  RawSpectrum raw;
  raw.n_shots = n_shots;
  std::size_t line_no = 0;
  bool seen_content = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text::trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = text::split_fields(line);
    const bool first = !seen_content;
    seen_content = true;
    if (fields.size() < 2) {
      if (first) continue;
      throw Error(ErrorCategory::parse, std::string(origin) + ":" + std::to_string(line_no) +
                                            ": expected two columns");
    }
    const auto t = text::parse_double(fields[0]);
    const auto y = text::parse_double(fields[1]);
    if (!t || !y) {
      if (first) continue;  // header line
      throw Error(ErrorCategory::parse,
                  std::string(origin) + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (!std::isfinite(*t) || !std::isfinite(*y)) {
      throw Error(ErrorCategory::parse,
                  std::string(origin) + ":" + std::to_string(line_no) + ": non-finite value");
    }
    if (!raw.ticks.empty() && !(*t > raw.ticks.back().tof)) {
      throw Error(ErrorCategory::invalid_argument,
                  std::string(origin) + ":" + std::to_string(line_no) + ": non-monotone TOF column");
    }
    raw.ticks.push_back({*t, *y});
    if (end == text.size()) break;
  }
  if (raw.ticks.size() < 2) {
    throw Error(ErrorCategory::invalid_argument,
                std::string(origin) + ": fewer than 2 samples");
  }
  return raw;
}

RawSpectrum load_spectrum(const std::filesystem::path& path, int n_shots) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCategory::io, "spectrum file not found: " + path.string());
  }
  return parse_spectrum(text::read_file(path), n_shots, path.string());
}

Spectrum standardize(const RawSpectrum& raw) {
  if (raw.n_shots <= 0) {
    throw Error(ErrorCategory::invalid_argument, "number of laser shots must be positive");
  }
  if (raw.ticks.empty()) throw Error(ErrorCategory::invalid_argument, "empty raw spectrum");
  const auto lowest = std::min_element(raw.ticks.begin(), raw.ticks.end(),
                                       [](const Sample& a, const Sample& b) {
                                         return a.intensity < b.intensity;
                                       })->intensity;
  const double shots = static_cast<double>(raw.n_shots);
  std::vector<double> t;
  std::vector<double> y;
  t.reserve(raw.ticks.size());
  y.reserve(raw.ticks.size());
  for (const auto& s : raw.ticks) {
    t.push_back(s.tof);
    y.push_back((s.intensity - lowest) / shots);
  }
  return Spectrum(std::move(t), std::move(y));
}

Spectrum mean_spectrum(std::span<const Spectrum> spectra) {
  if (spectra.empty()) throw Error(ErrorCategory::invalid_argument, "no spectra to average");
  const auto& first = spectra.front();
  std::vector<double> sum(first.size(), 0.0);
  for (const auto& s : spectra) {
    if (s.size() != first.size() ||
        !std::equal(s.tof().begin(), s.tof().end(), first.tof().begin())) {
      throw Error(ErrorCategory::invalid_argument, "spectra do not share a TOF grid");
    }
  }
  // Accumulate in a fixed order per grid point over a sorted copy so the
  // result does not depend on the order of the argument list.
  std::vector<double> column(spectra.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t k = 0; k < spectra.size(); ++k) column[k] = spectra[k].intensity()[i];
    std::sort(column.begin(), column.end());
    double acc = 0.0;
    for (double v : column) acc += v;
    sum[i] = acc / static_cast<double>(spectra.size());
  }
  const auto tof = first.tof();
  return Spectrum(std::vector<double>(tof.begin(), tof.end()), std::move(sum), first.range_lo(),
                  first.range_hi());
}

Spectrum clip_range(const Spectrum& s, double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorCategory::invalid_argument, "clip range requires lo < hi");
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double ti = s.tof()[i];
    if (ti >= lo && ti <= hi) {
      t.push_back(ti);
      y.push_back(s.intensity()[i]);
    }
  }
  if (t.empty()) {
    throw Error(ErrorCategory::invalid_argument, "clip range leaves no samples");
  }
  return Spectrum(std::move(t), std::move(y), lo, hi);
}

double tof_to_mz(double tof, const Calibration& c) {
  if (!(c.u > 0.0)) throw Error(ErrorCategory::domain, "calibration u must be positive");
  if (!(tof > c.t0)) throw Error(ErrorCategory::domain, "TOF must exceed calibration offset t0");
  const double dt = tof - c.t0;
  return c.u * dt * dt;
}

double mz_to_tof(double mz, const Calibration& c) {
  if (!(c.u > 0.0)) throw Error(ErrorCategory::domain, "calibration u must be positive");
  if (!(mz > 0.0)) throw Error(ErrorCategory::domain, "m/z must be positive");
  return c.t0 + std::sqrt(mz / c.u);
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& s,
                    const std::string& header_comment) {
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "tof,intensity\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << text::format_double(s.tof()[i]) << ',' << text::format_double(s.intensity()[i]) << '\n';
  }
  text::write_file(path, out.str());
}

}  // namespace larkms
