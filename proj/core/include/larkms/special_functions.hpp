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

namespace larkms {

/// Exponential integral E1(x) = \int_x^\infty e^{-z}/z dz for x > 0.
///
/// Power series on (0, 1], modified Lentz continued fraction above; both
/// branches hold relative error near machine precision.
[[nodiscard]] double exp_integral_e1(double x);

/// e^x E1(x), evaluated without overflow for large x.
[[nodiscard]] double scaled_exp_integral_e1(double x);

/// log E1(x), finite for every x > 0 (E1 itself underflows past x ~ 700).
[[nodiscard]] double log_exp_integral_e1(double x);

/// x e^x E1(x): the ratio of the truncation point to the mean of an
/// alpha = 0 truncated gamma law with rate lambda and truncation eps,
/// evaluated at x = lambda * eps. Increases from 0 to 1 on (0, inf).
[[nodiscard]] double truncation_to_mean_ratio(double x);

}  // namespace larkms
