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

#include <string_view>

namespace larkms {

/// Symmetric peak shapes, each a probability density in TOF.
enum class KernelKind { gaussian, cauchy };

[[nodiscard]] std::string_view kernel_name(KernelKind kind) noexcept;
[[nodiscard]] KernelKind parse_kernel(std::string_view name);

/// Width omega for a peak at `tau` with resolution rho = tau / FWHM.
///   Gaussian: omega = tau / (2 rho sqrt(ln 4));  Cauchy: omega = tau / (2 rho)
[[nodiscard]] double width_from_resolution(KernelKind kind, double tau, double rho);

/// Inverse of width_from_resolution.
[[nodiscard]] double resolution_from_width(KernelKind kind, double tau, double omega);

/// Full width at half maximum for width parameter omega.
[[nodiscard]] double fwhm(KernelKind kind, double omega);

/// FWHM / omega for the kernel family.
[[nodiscard]] double fwhm_factor(KernelKind kind) noexcept;

[[nodiscard]] double kernel_eval(KernelKind kind, double t, double tau, double omega);
[[nodiscard]] double kernel_deriv(KernelKind kind, double t, double tau, double omega);

/// Kernel value at its centre.
[[nodiscard]] double kernel_peak_height(KernelKind kind, double omega);

/// Half-width (in units of omega) beyond which a kernel's contribution is
/// below double precision relative to its height. Infinite for Cauchy.
[[nodiscard]] double kernel_support_radius(KernelKind kind) noexcept;

}  // namespace larkms
