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

#include "larkms/initializer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "larkms/truncated_gamma.hpp"

namespace larkms {

std::vector<double> nonnegative_least_squares(std::span<const double> design, std::size_t rows,
                                              std::span<const double> rhs, int max_sweeps,
                                              double tol) {
  const auto n = static_cast<Eigen::Index>(rows);
  const auto m = static_cast<Eigen::Index>(rows == 0 ? 0 : design.size() / rows);
  std::vector<double> x(static_cast<std::size_t>(m), 0.0);
  if (m == 0) return x;
  const Eigen::Map<const Eigen::MatrixXd> a(design.data(), n, m);
  const Eigen::Map<const Eigen::VectorXd> r(rhs.data(), n);
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd c = a.transpose() * r;
  // Gradient g = G x - c, kept current as coordinates move.
  Eigen::VectorXd g = -c;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double largest = 0.0;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = gram(j, j);
      if (!(d > 0.0)) continue;
      const double old = x[static_cast<std::size_t>(j)];
      const double next = std::max(0.0, old - g(j) / d);
      const double step = next - old;
      if (step != 0.0) {
        g += step * gram.col(j);
        x[static_cast<std::size_t>(j)] = next;
      }
      largest = std::max(largest, std::abs(step));
      scale = std::max(scale, std::abs(next));
    }
    if (largest <= tol * std::max(scale, 1e-300)) break;
  }
  return x;
}

std::vector<double> moving_average(std::span<const double> y, std::size_t half) {
  const std::size_t n = y.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

ModelState init_mode_seek(const Spectrum& spec, const Hyperparameters& h, KernelKind kind) {
  ModelState st;
  st.gamma = h.gamma_fixed;
  st.s = std::clamp(h.a_s / (h.a_s + h.b_s), 0.01, 0.99);
  st.phi = h.a_phi / h.b_phi;
  st.big_r = h.mu_r;
  st.bg.omega0 = h.omega0_hat;
  const double eta0_data = trunc_gamma_mean(h.lambda0, h.eps);
  st.bg.eta0 = std::max(eta0_data / (st.gamma * st.s), 1.01 * h.eps);

  const auto t = spec.tof();
  const auto y = spec.intensity();
  const std::size_t n = t.size();
  if (n < 3) return st;

  const double scale = st.gamma * st.s;
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    resid[i] = y[i] - st.gamma * (1.0 - st.s) - scale * background_eval(st.bg, t[i], h.t0);
  }

  const double median_t = t[n / 2];
  const double width = median_t / h.mu_r;
  const double spacing = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
  const auto half = static_cast<std::size_t>(std::lround(0.5 * width / spacing));
  const auto smooth = moving_average(resid, half);

  struct Candidate {
    std::size_t index;
    double height;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (t[i] < h.t0 || t[i] > h.t1) continue;
    if (!(smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1])) continue;
    const double omega = width_from_resolution(kind, t[i], h.mu_r);
    if (smooth[i] > scale * h.eps * kernel_peak_height(kind, omega)) cands.push_back({i, smooth[i]});
  }
  const auto cap = static_cast<std::size_t>(std::floor(3.0 * h.nu_j));
  if (cands.size() > cap) {
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.height > b.height; });
    cands.resize(cap);
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
  }
  if (cands.empty()) return st;

  const std::size_t m = cands.size();
  std::vector<double> design(n * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double tau = t[cands[j].index];
    const double omega = width_from_resolution(kind, tau, h.mu_r);
    for (std::size_t i = 0; i < n; ++i) design[j * n + i] = scale * kernel_eval(kind, t[i], tau, omega);
  }
  const auto eta = nonnegative_least_squares(design, n, resid);
  for (std::size_t j = 0; j < m; ++j) {
    if (eta[j] > h.eps) st.peaks.push_back({t[cands[j].index], h.mu_r, eta[j]});
  }
  return st;
}

}  // namespace larkms
