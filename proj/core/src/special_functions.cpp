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

#include "larkms/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "larkms/error.hpp"

namespace larkms {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kTolerance = 1e-16;

void require_positive(double x) {
  if (!(x > 0.0)) throw Error(ErrorCategory::domain, "exponential integral requires x > 0");
}

// E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
double e1_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= kMaxIterations; ++k) {
    term *= -x / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < kTolerance * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(x) - sum;
}

// e^x E1(x) via the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...))).
double scaled_e1_fraction(double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < kTolerance) return h;
  }
  throw Error(ErrorCategory::domain, "E1 continued fraction failed to converge");
}

}  // namespace

double exp_integral_e1(double x) {
  require_positive(x);
  if (x <= 1.0) return e1_series(x);
  return scaled_e1_fraction(x) * std::exp(-x);
}

double scaled_exp_integral_e1(double x) {
  require_positive(x);
  if (x <= 1.0) return std::exp(x) * e1_series(x);
  return scaled_e1_fraction(x);
}

double log_exp_integral_e1(double x) {
  require_positive(x);
  if (x <= 1.0) return std::log(e1_series(x));
  return std::log(scaled_e1_fraction(x)) - x;
}

double truncation_to_mean_ratio(double x) { return x * scaled_exp_integral_e1(x); }

}  // namespace larkms
