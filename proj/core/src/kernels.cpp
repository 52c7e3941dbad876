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

#include "larkms/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "larkms/error.hpp"

namespace larkms {

namespace {

const double kSqrtLn4 = std::sqrt(std::log(4.0));
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

void require_positive_width(double omega) {
  if (!(omega > 0.0)) throw Error(ErrorCategory::domain, "kernel width must be positive");
}

}  // namespace

std::string_view kernel_name(KernelKind kind) noexcept {
  return kind == KernelKind::gaussian ? "gaussian" : "cauchy";
}

KernelKind parse_kernel(std::string_view name) {
  if (name == "gaussian") return KernelKind::gaussian;
  if (name == "cauchy" || name == "lorentzian") return KernelKind::cauchy;
  throw Error(ErrorCategory::invalid_argument, "unknown kernel: " + std::string(name));
}

double fwhm_factor(KernelKind kind) noexcept {
  return kind == KernelKind::gaussian ? 2.0 * kSqrtLn4 : 2.0;
}

double width_from_resolution(KernelKind kind, double tau, double rho) {
  if (!(tau > 0.0) || !(rho > 0.0)) {
    throw Error(ErrorCategory::domain, "width_from_resolution requires tau > 0 and rho > 0");
  }
  return tau / (rho * fwhm_factor(kind));
}

double resolution_from_width(KernelKind kind, double tau, double omega) {
  if (!(tau > 0.0)) throw Error(ErrorCategory::domain, "resolution requires tau > 0");
  require_positive_width(omega);
  return tau / (omega * fwhm_factor(kind));
}

double fwhm(KernelKind kind, double omega) {
  require_positive_width(omega);
  return fwhm_factor(kind) * omega;
}

double kernel_eval(KernelKind kind, double t, double tau, double omega) {
  const double d = t - tau;
  if (kind == KernelKind::gaussian) {
    const double z = d / omega;
    return kInvSqrt2Pi / omega * std::exp(-0.5 * z * z);
  }
  return omega / (std::numbers::pi * (omega * omega + d * d));
}

double kernel_deriv(KernelKind kind, double t, double tau, double omega) {
  const double d = t - tau;
  if (kind == KernelKind::gaussian) {
    return -d / (omega * omega) * kernel_eval(kind, t, tau, omega);
  }
  const double q = omega * omega + d * d;
  return -2.0 * omega * d / (std::numbers::pi * q * q);
}

double kernel_peak_height(KernelKind kind, double omega) {
  require_positive_width(omega);
  return kind == KernelKind::gaussian ? kInvSqrt2Pi / omega : 1.0 / (std::numbers::pi * omega);
}

double kernel_support_radius(KernelKind kind) noexcept {
  // exp(-z^2/2) < 2^-106 for z > 12.2, below double precision even when
  // many peaks overlap.
  return kind == KernelKind::gaussian ? 12.5 : std::numeric_limits<double>::infinity();
}

}  // namespace larkms
