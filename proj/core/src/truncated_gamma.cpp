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

#include "larkms/truncated_gamma.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "larkms/error.hpp"
#include "larkms/special_functions.hpp"

namespace larkms {

TruncatedGamma::TruncatedGamma(double lambda_, double eps_) : lambda(lambda_), eps(eps_) {
  if (!(lambda > 0.0)) throw Error(ErrorCategory::domain, "truncated gamma rate must be positive");
  if (!(eps > 0.0)) {
    throw Error(ErrorCategory::domain, "alpha = 0 truncated gamma requires eps > 0");
  }
  log_norm_ = log_exp_integral_e1(lambda * eps);
}

double TruncatedGamma::log_pdf(double eta) const {
  if (!(eta > eps)) return -std::numeric_limits<double>::infinity();
  return -std::log(eta) - lambda * eta - log_norm_;
}

double TruncatedGamma::cdf(double eta) const {
  if (!(eta > eps)) return 0.0;
  return -std::expm1(log_exp_integral_e1(lambda * eta) - log_norm_);
}

double TruncatedGamma::mean() const { return 1.0 / (lambda * scaled_exp_integral_e1(lambda * eps)); }

double TruncatedGamma::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCategory::domain, "quantile requires p in [0, 1)");
  if (p == 0.0) return eps;
  // Solve log E1(x) = log(1 - p) + log E1(lambda eps) for x >= lambda eps.
  const double target = std::log1p(-p) + log_norm_;
  const auto f = [target](double x) { return log_exp_integral_e1(x) - target; };
  const double lo = lambda * eps;
  double hi = std::max(2.0 * lo, lo + 1.0);
  while (f(hi) > 0.0) hi *= 2.0;
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tol, max_iter);
  return 0.5 * (a + b) / lambda;
}

double trunc_gamma_logpdf(double eta, double lambda, double eps) {
  return TruncatedGamma(lambda, eps).log_pdf(eta);
}

double trunc_gamma_mean(double lambda, double eps) { return TruncatedGamma(lambda, eps).mean(); }

}  // namespace larkms
