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
#include "larkms/model.hpp"
#include "larkms/priors.hpp"
#include "larkms/spectrum.hpp"

namespace larkms {

/// Nonnegative least squares min |A x - r|^2, x >= 0, by cyclic coordinate
/// descent on the normal equations. `design` is column-major with `rows`
/// rows. Deterministic.
[[nodiscard]] std::vector<double> nonnegative_least_squares(std::span<const double> design,
                                                            std::size_t rows,
                                                            std::span<const double> rhs,
                                                            int max_sweeps = 2000,
                                                            double tol = 1e-12);

/// Centred moving average with half-width `half` points, shrinking at the ends.
[[nodiscard]] std::vector<double> moving_average(std::span<const double> y, std::size_t half);

/// Deterministic starting state near a posterior mode: background at its
/// elicited centre, peaks at residual maxima with abundances from NNLS.
[[nodiscard]] ModelState init_mode_seek(const Spectrum& spec, const Hyperparameters& h,
                                        KernelKind kind);

}  // namespace larkms
