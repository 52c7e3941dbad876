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

#include "larkms/likelihood.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "larkms/error.hpp"

namespace larkms {

std::string_view likelihood_name(ObservationModel m) noexcept {
  return m == ObservationModel::gamma ? "gamma" : "normal";
}

ObservationModel parse_likelihood(std::string_view name) {
  if (name == "gamma") return ObservationModel::gamma;
  if (name == "normal" || name == "gaussian") return ObservationModel::gaussian;
  throw Error(ErrorCategory::invalid_argument, "unknown likelihood: " + std::string(name));
}

double gamma_intensity_offset(const Spectrum& spec) { return 1e-6 * spec.mean_intensity(); }

double log_likelihood(const ModelState& state, KernelKind kind, const LikelihoodKind& lk,
                      const Spectrum& spec, double xi_a) {
  const auto mu = mean_intensity_grid(state, kind, spec.tof(), xi_a);
  const auto y = spec.intensity();
  const double log_phi = std::log(state.phi);
  double total = 0.0;
  if (lk.model == ObservationModel::gamma) {
    const double delta = gamma_intensity_offset(spec);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!(mu[i] > 0.0)) return -std::numeric_limits<double>::infinity();
      const double yi = y[i] + delta;
      total += gamma_log_density(yi, std::log(yi), mu[i], state.phi, log_phi);
    }
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) {
      total += normal_log_density(y[i], mu[i], state.phi, log_phi);
    }
  }
  return total;
}

double log_likelihood(const ModelState& state, KernelKind kind, const LikelihoodKind& lk,
                      const Spectrum& spec) {
  return log_likelihood(state, kind, lk, spec, spec.range_lo());
}

double robust_noise_sd(const Spectrum& spec) {
  const auto y = spec.intensity();
  if (y.size() < 4) throw Error(ErrorCategory::invalid_argument, "too few samples for noise estimate");
  std::vector<double> detail;
  detail.reserve(y.size() / 2);
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  for (std::size_t i = 0; i + 1 < y.size(); i += 2) {
    detail.push_back(std::abs(y[i + 1] - y[i]) * kInvSqrt2);
  }
  const auto mid = detail.begin() + static_cast<std::ptrdiff_t>(detail.size() / 2);
  std::nth_element(detail.begin(), mid, detail.end());
  double med = *mid;
  if (detail.size() % 2 == 0) {
    const double lower = *std::max_element(detail.begin(), mid);
    med = 0.5 * (med + lower);
  }
  return med / 0.6745;
}

}  // namespace larkms
