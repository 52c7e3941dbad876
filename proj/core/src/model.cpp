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

#include "larkms/model.hpp"

#include <cmath>

namespace larkms {

double signature_eval(const ModelState& state, KernelKind kind, double t) {
  double f = 0.0;
  for (const auto& p : state.peaks) {
    f += kernel_eval(kind, t, p.tau, width_from_resolution(kind, p.tau, p.rho)) * p.eta;
  }
  return f;
}

double signature_deriv(const ModelState& state, KernelKind kind, double t) {
  double f = 0.0;
  for (const auto& p : state.peaks) {
    f += kernel_deriv(kind, t, p.tau, width_from_resolution(kind, p.tau, p.rho)) * p.eta;
  }
  return f;
}

double background_eval(const BackgroundParams& bg, double t, double xi_a) {
  if (!(t > xi_a)) return 0.0;
  return bg.eta0 / bg.omega0 * std::exp(-(t - xi_a) / bg.omega0);
}

double background_deriv(const BackgroundParams& bg, double t, double xi_a) {
  return -background_eval(bg, t, xi_a) / bg.omega0;
}

double mean_intensity(const ModelState& state, KernelKind kind, double t, double xi_a) {
  const double signal = signature_eval(state, kind, t) + background_eval(state.bg, t, xi_a);
  return state.gamma * ((1.0 - state.s) + state.s * signal);
}

double mean_intensity_deriv(const ModelState& state, KernelKind kind, double t, double xi_a) {
  return state.gamma * state.s *
         (signature_deriv(state, kind, t) + background_deriv(state.bg, t, xi_a));
}

std::vector<double> mean_intensity_grid(const ModelState& state, KernelKind kind,
                                        std::span<const double> grid, double xi_a) {
  std::vector<double> mu(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) mu[i] = mean_intensity(state, kind, grid[i], xi_a);
  return mu;
}

bool is_valid(const ModelState& state) {
  const auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(state.gamma) || !pos(state.phi) || !pos(state.big_r)) return false;
  if (!(state.s >= 0.0 && state.s <= 1.0)) return false;
  if (!pos(state.bg.omega0) || !pos(state.bg.eta0)) return false;
  for (const auto& p : state.peaks) {
    if (!pos(p.tau) || !pos(p.rho) || !pos(p.eta)) return false;
  }
  return true;
}

}  // namespace larkms
