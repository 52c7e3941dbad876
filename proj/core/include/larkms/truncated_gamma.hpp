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

#include <random>

namespace larkms {

/// Left-truncated gamma law with shape alpha = 0:
///   p(eta) = eta^{-1} e^{-lambda eta} / E1(lambda eps),  eta > eps.
/// Used for every peak abundance and for the background intensity.
struct TruncatedGamma {
  double lambda = 1.0;  ///< rate
  double eps = 1.0;     ///< truncation point, strictly positive

  TruncatedGamma() = default;
  TruncatedGamma(double lambda, double eps);

  [[nodiscard]] double log_pdf(double eta) const;
  [[nodiscard]] double cdf(double eta) const;
  [[nodiscard]] double mean() const;
  /// Inverse CDF, p in [0, 1).
  [[nodiscard]] double quantile(double p) const;

  template <class Rng>
  double sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return quantile(unif(rng));
  }

 private:
  double log_norm_ = 0.0;  // log E1(lambda eps)
};

[[nodiscard]] double trunc_gamma_logpdf(double eta, double lambda, double eps);
[[nodiscard]] double trunc_gamma_mean(double lambda, double eps);

template <class Rng>
double trunc_gamma_sample(Rng& rng, double lambda, double eps) {
  return TruncatedGamma(lambda, eps).sample(rng);
}

}  // namespace larkms
