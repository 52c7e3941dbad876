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
#include <string_view>

#include "larkms/kernels.hpp"
#include "larkms/model.hpp"
#include "larkms/spectrum.hpp"

namespace larkms {

enum class ObservationModel { gamma, gaussian };

/// Observation law. For the Gaussian law, `phi` in ModelState is 1/sigma^2;
/// `sample_variance` selects whether the sampler updates it.
struct LikelihoodKind {
  ObservationModel model = ObservationModel::gamma;
  bool sample_variance = false;
};

[[nodiscard]] std::string_view likelihood_name(ObservationModel m) noexcept;
[[nodiscard]] ObservationModel parse_likelihood(std::string_view name);

/// Offset added to every intensity before gamma-likelihood evaluation; the
/// gamma density has no mass at y = 0 and standardization always produces one.
[[nodiscard]] double gamma_intensity_offset(const Spectrum& spec);

/// log Ga(y; phi mu, phi) with log y and log phi supplied by the caller.
[[nodiscard]] inline double gamma_log_density(double y, double log_y, double mu, double phi,
                                              double log_phi) {
  const double shape = phi * mu;
  return shape * log_phi - std::lgamma(shape) + (shape - 1.0) * log_y - phi * y;
}

/// log N(y; mu, 1/phi).
[[nodiscard]] inline double normal_log_density(double y, double mu, double phi, double log_phi) {
  constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
  const double r = y - mu;
  return 0.5 * log_phi - kHalfLog2Pi - 0.5 * phi * r * r;
}

/// Sum of pointwise log densities over the spectrum grid. Returns -inf if
/// any mean is non-positive under the gamma law.
[[nodiscard]] double log_likelihood(const ModelState& state, KernelKind kind,
                                    const LikelihoodKind& lk, const Spectrum& spec, double xi_a);

/// xi_a defaults to the spectrum's lower range bound.
[[nodiscard]] double log_likelihood(const ModelState& state, KernelKind kind,
                                    const LikelihoodKind& lk, const Spectrum& spec);

/// Robust noise standard deviation: median absolute finest-scale Haar
/// detail (y_{2i+1} - y_{2i})/sqrt 2, divided by 0.6745.
[[nodiscard]] double robust_noise_sd(const Spectrum& spec);

}  // namespace larkms
