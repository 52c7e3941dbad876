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

#include "larkms/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "larkms/error.hpp"
#include "larkms/text_io.hpp"

namespace larkms {

namespace {

void require(bool ok, const char* field) {
  if (!ok) throw Error(ErrorCategory::invalid_argument, std::string("invalid truth field: ") + field);
}

std::string triplet(double a, double b, double c) {
  return text::format_double(a) + " " + text::format_double(b) + " " + text::format_double(c);
}

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> t(n_points);
  const double h = spacing();
  for (std::size_t i = 0; i < n_points; ++i) t[i] = tof_lo + static_cast<double>(i) * h;
  t.back() = tof_hi;
  return t;
}

void TruthSpec::validate() const {
  require(grid.n_points >= 2, "grid_points");
  require(std::isfinite(grid.tof_lo) && std::isfinite(grid.tof_hi) && grid.tof_hi > grid.tof_lo,
          "grid range");
  require(n_replicates >= 1, "n_replicates");
  require(s >= 0.0 && s <= 1.0, "s");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma");
  require(noise == NoiseLaw::gaussian ? (sigma >= 0.0 && std::isfinite(sigma))
                                      : (phi > 0.0 && std::isfinite(phi)),
          noise == NoiseLaw::gaussian ? "sigma" : "phi");
  require(calib.u > 0.0, "calib_u");
  for (const auto& p : peaks) {
    require(std::isfinite(p.tau) && p.rho > 0.0 && p.eta > 0.0 && std::isfinite(p.rho) &&
                std::isfinite(p.eta),
            "peak");
  }
  if (background) require(background->omega0 > 0.0 && background->eta0 >= 0.0, "background");
}

ModelState TruthSpec::model_state() const {
  ModelState st;
  st.gamma = gamma;
  st.s = s;
  st.peaks = peaks;
  st.bg = background.value_or(BackgroundParams{1.0, 0.0});
  st.phi = noise == NoiseLaw::gamma ? phi : (sigma > 0.0 ? 1.0 / (sigma * sigma) : 1.0);
  return st;
}

std::vector<double> TruthSpec::masses() const {
  std::vector<double> m;
  m.reserve(peaks.size());
  for (const auto& p : peaks) m.push_back(tof_to_mz(p.tau, calib));
  return m;
}

SimulationOutput generate_spectrum(const TruthSpec& truth, KernelKind kind, std::uint64_t seed) {
  truth.validate();
  const auto grid = truth.grid.points();
  const auto mu = mean_intensity_grid(truth.model_state(), kind, grid, truth.xi_a);
  SimulationOutput out;
  out.replicates.reserve(static_cast<std::size_t>(truth.n_replicates));
  for (int r = 0; r < truth.n_replicates; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::vector<double> y(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (truth.noise == NoiseLaw::gamma) {
        std::gamma_distribution<double> g(truth.phi * mu[i], 1.0 / truth.phi);
        y[i] = g(rng);
      } else if (truth.sigma == 0.0) {
        y[i] = mu[i];
      } else {
        std::normal_distribution<double> z(mu[i], truth.sigma);
        y[i] = z(rng);
      }
      if (y[i] < 0.0) {
        y[i] = 0.0;
        ++out.n_floored;
      }
    }
    out.n_values += y.size();
    out.replicates.emplace_back(grid, std::move(y));
  }
  return out;
}

Spectrum mean_of_replicates(const SimulationOutput& out) {
  if (out.replicates.empty()) throw Error(ErrorCategory::invalid_argument, "no replicates");
  return mean_spectrum(out.replicates);
}

KeyValueConfig truth_to_config(const TruthSpec& truth) {
  KeyValueConfig cfg;
  cfg.set("grid_lo", truth.grid.tof_lo);
  cfg.set("grid_hi", truth.grid.tof_hi);
  cfg.set("grid_points", std::to_string(truth.grid.n_points));
  cfg.set("n_replicates", std::to_string(truth.n_replicates));
  cfg.set("s", truth.s);
  cfg.set("gamma", truth.gamma);
  cfg.set("noise", truth.noise == NoiseLaw::gamma ? "gamma" : "gaussian");
  cfg.set("phi", truth.phi);
  cfg.set("sigma", truth.sigma);
  cfg.set("xi_a", truth.xi_a);
  cfg.set("calib_u", truth.calib.u);
  cfg.set("calib_t0", truth.calib.t0);
  if (truth.background) {
    cfg.set("omega0", truth.background->omega0);
    cfg.set("eta0", truth.background->eta0);
  }
  cfg.set("n_peaks", std::to_string(truth.peaks.size()));
  for (std::size_t k = 0; k < truth.peaks.size(); ++k) {
    const auto& p = truth.peaks[k];
    cfg.set("peak." + std::to_string(k), triplet(p.tau, p.rho, p.eta),
            "mz " + text::format_double(tof_to_mz(p.tau, truth.calib)));
  }
  return cfg;
}

TruthSpec truth_from_config(const KeyValueConfig& cfg) {
  TruthSpec t;
  t.grid.tof_lo = cfg.get_double("grid_lo");
  t.grid.tof_hi = cfg.get_double("grid_hi");
  const auto points = cfg.get_int("grid_points");
  if (points < 2) throw Error(ErrorCategory::schema, "grid_points must be at least 2");
  t.grid.n_points = static_cast<std::size_t>(points);
  t.n_replicates = static_cast<int>(cfg.get_int_or("n_replicates", 1));
  t.s = cfg.get_double_or("s", t.s);
  t.gamma = cfg.get_double_or("gamma", 1.0);
  const auto noise = cfg.get_string_or("noise", "gaussian");
  if (noise == "gamma") {
    t.noise = NoiseLaw::gamma;
  } else if (noise == "gaussian") {
    t.noise = NoiseLaw::gaussian;
  } else {
    throw Error(ErrorCategory::schema, "noise must be gamma or gaussian");
  }
  t.phi = cfg.get_double_or("phi", 1.0);
  t.sigma = cfg.get_double_or("sigma", 0.0);
  t.xi_a = cfg.get_double_or("xi_a", t.grid.tof_lo);
  t.calib.u = cfg.get_double_or("calib_u", 1.0);
  t.calib.t0 = cfg.get_double_or("calib_t0", 0.0);
  if (cfg.has("omega0") || cfg.has("eta0")) {
    t.background = BackgroundParams{cfg.get_double("omega0"), cfg.get_double("eta0")};
  }
  const auto n = cfg.get_int_or("n_peaks", 0);
  if (n < 0) throw Error(ErrorCategory::schema, "n_peaks must be non-negative");
  for (long long k = 0; k < n; ++k) {
    const std::string by_tau = "peak." + std::to_string(k);
    const std::string by_mz = "peak_mz." + std::to_string(k);
    const bool mz = !cfg.has(by_tau) && cfg.has(by_mz);
    const std::string key = mz ? by_mz : by_tau;
    const std::string value = cfg.get_string(key);
    const auto fields = text::split_whitespace(value);
    if (fields.size() != 3) throw Error(ErrorCategory::schema, key + " needs three values");
    double v[3];
    for (int i = 0; i < 3; ++i) {
      const auto d = text::parse_double(fields[static_cast<std::size_t>(i)]);
      if (!d) throw Error(ErrorCategory::schema, key + " has a non-numeric value");
      v[i] = *d;
    }
    t.peaks.push_back({mz ? mz_to_tof(v[0], t.calib) : v[0], v[1], v[2]});
  }
  t.validate();
  return t;
}

void write_truth_record(const std::filesystem::path& path, const TruthSpec& truth,
                        const std::string& header) {
  truth_to_config(truth).save(path, header);
}

TruthSpec read_truth_record(const std::filesystem::path& path) {
  return truth_from_config(KeyValueConfig::load(path));
}

}  // namespace larkms
