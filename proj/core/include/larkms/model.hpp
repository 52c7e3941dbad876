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

#include <span>
#include <vector>

#include "larkms/kernels.hpp"

namespace larkms {

/// One protein peak: location (µs), resolution tau/FWHM, abundance.
/// The kernel width is derived from (tau, rho); it is never stored.
struct PeakParams {
  double tau = 0.0;
  double rho = 1.0;
  double eta = 0.0;

  friend bool operator==(const PeakParams&, const PeakParams&) = default;
};

/// Exponentially decaying matrix background.
struct BackgroundParams {
  double omega0 = 1.0;  ///< decay time, µs
  double eta0 = 1.0;    ///< intensity

  friend bool operator==(const BackgroundParams&, const BackgroundParams&) = default;
};

/// Full parameter vector of the spectrum model.
struct ModelState {
  double gamma = 1.0;  ///< overall scale, fixed at the mean intensity
  double s = 0.5;      ///< signal fraction in [0, 1]
  std::vector<PeakParams> peaks;
  BackgroundParams bg;
  double phi = 1.0;    ///< gamma-likelihood precision, or 1/sigma^2 for the Gaussian likelihood
  double big_r = 1.0;  ///< experiment-wide resolution

  [[nodiscard]] std::size_t num_peaks() const noexcept { return peaks.size(); }

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// f(t) = sum_j k(t; tau_j, omega_j) eta_j.
[[nodiscard]] double signature_eval(const ModelState& state, KernelKind kind, double t);

/// d f / dt.
[[nodiscard]] double signature_deriv(const ModelState& state, KernelKind kind, double t);

/// b(t) = (eta0/omega0) exp(-(t - xi_a)/omega0) for t > xi_a, else 0.
[[nodiscard]] double background_eval(const BackgroundParams& bg, double t, double xi_a);

/// d b / dt = -b(t)/omega0 for t > xi_a.
[[nodiscard]] double background_deriv(const BackgroundParams& bg, double t, double xi_a);

/// mu(t) = gamma {(1 - s) + s [f(t) + b(t)]}.
[[nodiscard]] double mean_intensity(const ModelState& state, KernelKind kind, double t, double xi_a);

/// d mu / dt = gamma s [f'(t) + b'(t)].
[[nodiscard]] double mean_intensity_deriv(const ModelState& state, KernelKind kind, double t,
                                          double xi_a);

/// mu on every grid point. Each point sums peaks in list order.
[[nodiscard]] std::vector<double> mean_intensity_grid(const ModelState& state, KernelKind kind,
                                                      std::span<const double> grid, double xi_a);

/// Structural validity: positivity, s in [0, 1], finite values.
[[nodiscard]] bool is_valid(const ModelState& state);

}  // namespace larkms
