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

#include "larkms/peak_id.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "larkms/error.hpp"
#include "larkms/text_io.hpp"

namespace larkms {

namespace {

using text::format_double;

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

void put_header(std::ostringstream& out, const std::string& header) {
  if (!header.empty()) out << "# " << header << '\n';
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text::trim(text.substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

double need_double(std::string_view field, const std::string& what) {
  const auto v = text::parse_double(field);
  if (!v) throw Error(ErrorCategory::schema, what + ": not a number: " + std::string(field));
  return *v;
}

}  // namespace

std::string_view method_name(PeakMethod m) noexcept { return m == PeakMethod::hp ? "HP" : "MA"; }

PeakMethod parse_method(std::string_view name) {
  if (name == "HP") return PeakMethod::hp;
  if (name == "MA") return PeakMethod::ma;
  throw Error(ErrorCategory::schema, "unknown peak method: " + std::string(name));
}

std::vector<double> posterior_mean_curve(const PosteriorSamples& samples,
                                         std::span<const double> grid, KernelKind kind,
                                         bool deriv) {
  if (samples.draws.empty()) {
    throw Error(ErrorCategory::invalid_argument, "posterior_mean_curve needs at least one draw");
  }
  const std::size_t n = grid.size();
  std::vector<double> total(n, 0.0);
  std::vector<double> f(n);
  const double radius = kernel_support_radius(kind);
  for (const auto& d : samples.draws) {
    const auto& st = d.state;
    std::fill(f.begin(), f.end(), 0.0);
    for (const auto& p : st.peaks) {
      const double omega = width_from_resolution(kind, p.tau, p.rho);
      std::size_t lo = 0;
      std::size_t hi = n;
      if (std::isfinite(radius)) {
        lo = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), p.tau - radius * omega) -
                                      grid.begin());
        hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), p.tau + radius * omega) -
                                      grid.begin());
      }
      for (std::size_t i = lo; i < hi; ++i) {
        f[i] += p.eta * (deriv ? kernel_deriv(kind, grid[i], p.tau, omega)
                               : kernel_eval(kind, grid[i], p.tau, omega));
      }
    }
    const double scale = st.gamma * st.s;
    for (std::size_t i = 0; i < n; ++i) {
      if (deriv) {
        total[i] += scale * (f[i] + background_deriv(st.bg, grid[i], samples.xi_a));
      } else {
        total[i] += st.gamma * (1.0 - st.s) + scale * (f[i] + background_eval(st.bg, grid[i], samples.xi_a));
      }
    }
  }
  const double count = static_cast<double>(samples.draws.size());
  for (auto& v : total) v /= count;
  return total;
}

std::size_t hp_index(const PosteriorSamples& samples) {
  if (samples.draws.empty()) throw Error(ErrorCategory::invalid_argument, "no stored draws");
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.draws.size(); ++i) {
    if (samples.draws[i].log_posterior > samples.draws[best].log_posterior) best = i;
  }
  return best;
}

PeakReport hp_peaks(const PosteriorSamples& samples, const Calibration& calib, std::string run_id) {
  const auto& st = samples.draws[hp_index(samples)].state;
  PeakReport report;
  report.method = PeakMethod::hp;
  report.run_id = std::move(run_id);
  for (const auto& p : st.peaks) report.peaks.push_back({p.tau, tof_to_mz(p.tau, calib), p.eta, p.rho});
  std::stable_sort(report.peaks.begin(), report.peaks.end(),
                   [](const ReportedPeak& a, const ReportedPeak& b) { return a.tau < b.tau; });
  return report;
}

std::vector<double> refine_grid(std::span<const double> grid, int factor) {
  if (factor < 1) throw Error(ErrorCategory::invalid_argument, "refinement factor must be >= 1");
  if (grid.size() < 2 || factor == 1) return {grid.begin(), grid.end()};
  std::vector<double> out;
  out.reserve((grid.size() - 1) * static_cast<std::size_t>(factor) + 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double step = (grid[i + 1] - grid[i]) / factor;
    for (int k = 0; k < factor; ++k) out.push_back(grid[i] + k * step);
  }
  out.push_back(grid.back());
  return out;
}

PeakReport ma_peaks(const PosteriorSamples& samples, std::span<const double> grid, KernelKind kind,
                    const Calibration& calib, std::string run_id) {
  PeakReport report;
  report.method = PeakMethod::ma;
  report.run_id = std::move(run_id);
  const auto d = posterior_mean_curve(samples, grid, kind, true);
  std::optional<std::size_t> last_positive;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      last_positive = i;
    } else if (d[i] < 0.0) {
      if (last_positive) {
        const std::size_t p = *last_positive;
        double tau;
        if (p + 1 == i) {
          tau = grid[p] + d[p] / (d[p] - d[i]) * (grid[i] - grid[p]);
        } else {
          tau = 0.5 * (grid[p + 1] + grid[i - 1]);  // centre of an exactly flat run
        }
        // The background switches on at xi_a, so mu jumps there and a bracket
        // touching xi_a does not locate a mode.
        if (grid[p] > samples.xi_a && tau <= samples.xi_b) {
          report.peaks.push_back({tau, tof_to_mz(tau, calib), std::nullopt, std::nullopt});
        }
      }
      last_positive.reset();
    }
  }
  return report;
}

PeakReport filter_by_resolution(const PeakReport& report, double rho_min) {
  if (report.method != PeakMethod::hp) {
    throw Error(ErrorCategory::invalid_argument, "resolution filter needs an HP report");
  }
  PeakReport out = report;
  out.peaks.clear();
  for (const auto& p : report.peaks) {
    if (!p.rho) throw Error(ErrorCategory::invalid_argument, "peak without resolution");
    if (*p.rho >= rho_min) out.peaks.push_back(p);
  }
  return out;
}

MatchResult match_peaks(const PeakReport& identified, std::span<const double> truth_mz, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCategory::invalid_argument, "tolerance must be positive");
  MatchResult r;
  r.n_identified = identified.peaks.size();
  std::size_t hits = 0;
  for (double m : truth_mz) {
    TruthMatch tm{m, std::nullopt};
    double best = 0.0;
    for (const auto& p : identified.peaks) {
      const double gap = std::abs(p.mz - m);
      if (gap <= tol * m && (!tm.matched_mz || gap < best)) {
        tm.matched_mz = p.mz;
        best = gap;
      }
    }
    if (tm.matched_mz) ++hits;
    r.matches.push_back(tm);
  }
  for (const auto& p : identified.peaks) {
    const bool inside = std::any_of(truth_mz.begin(), truth_mz.end(),
                                    [&](double m) { return std::abs(p.mz - m) <= tol * m; });
    if (!inside) ++r.n_false_positive;
  }
  r.tpr = truth_mz.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth_mz.size());
  r.fdr = r.n_identified == 0 ? 0.0
                              : static_cast<double>(r.n_false_positive) /
                                    static_cast<double>(r.n_identified);
  return r;
}

PosteriorSummary summarize(const PosteriorSamples& samples, std::size_t j_dv) {
  if (samples.draws.empty()) throw Error(ErrorCategory::invalid_argument, "no stored draws");
  PosteriorSummary out;
  out.n_draws = samples.draws.size();
  const double n = static_cast<double>(out.n_draws);
  const auto moments = [&](auto get) {
    double mean = 0.0;
    for (const auto& d : samples.draws) mean += get(d.state);
    mean /= n;
    double ss = 0.0;
    for (const auto& d : samples.draws) {
      const double r = get(d.state) - mean;
      ss += r * r;
    }
    return PosteriorSummary::Moments{mean, out.n_draws > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
  };
  out.s = moments([](const ModelState& s) { return s.s; });
  out.phi = moments([](const ModelState& s) { return s.phi; });
  out.big_r = moments([](const ModelState& s) { return s.big_r; });
  out.eta0 = moments([](const ModelState& s) { return s.bg.eta0; });
  out.omega0 = moments([](const ModelState& s) { return s.bg.omega0; });
  out.j = moments([](const ModelState& s) { return static_cast<double>(s.peaks.size()); });
  out.j_hp = samples.draws[hp_index(samples)].state.peaks.size();
  out.j_dv = j_dv;
  return out;
}

void write_peak_report(const std::filesystem::path& path, const PeakReport& report,
                       const std::string& header) {
  std::ostringstream out;
  put_header(out, header);
  if (!report.run_id.empty()) out << "# run_id " << report.run_id << '\n';
  out << "method,tau_us,mz_da,eta,rho\n";
  for (const auto& p : report.peaks) {
    out << method_name(report.method) << ',' << format_double(p.tau) << ',' << format_double(p.mz)
        << ',' << optional_field(p.eta) << ',' << optional_field(p.rho) << '\n';
  }
  text::write_file(path, out.str());
}

PeakReport read_peak_report(const std::filesystem::path& path) {
  const auto content = text::read_file(path);
  const std::string origin = path.string();
  PeakReport report;
  bool saw_header = false;
  bool saw_row = false;
  for (auto line : lines_of(content)) {
    if (line.front() == '#') {
      constexpr std::string_view tag = "# run_id ";
      if (line.substr(0, tag.size()) == tag) report.run_id = std::string(line.substr(tag.size()));
      continue;
    }
    const auto fields = text::split_fields(line);
    if (!saw_header) {
      if (fields.size() != 5 || fields[0] != "method" || fields[1] != "tau_us" ||
          fields[2] != "mz_da" || fields[3] != "eta" || fields[4] != "rho") {
        throw Error(ErrorCategory::schema, origin + ": expected header method,tau_us,mz_da,eta,rho");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 5) throw Error(ErrorCategory::schema, origin + ": peak row needs 5 fields");
    const auto method = parse_method(fields[0]);
    if (saw_row && method != report.method) {
      throw Error(ErrorCategory::schema, origin + ": mixed methods in one report");
    }
    report.method = method;
    saw_row = true;
    ReportedPeak p;
    p.tau = need_double(fields[1], origin);
    p.mz = need_double(fields[2], origin);
    if (fields[3] != "NA") p.eta = need_double(fields[3], origin);
    if (fields[4] != "NA") p.rho = need_double(fields[4], origin);
    report.peaks.push_back(p);
  }
  if (!saw_header) throw Error(ErrorCategory::schema, origin + ": missing peak report header");
  return report;
}

void write_match_result(const std::filesystem::path& path, const MatchResult& result, double tol,
                        const std::string& header) {
  std::ostringstream out;
  put_header(out, header);
  out << "tol = " << format_double(tol) << '\n';
  out << "tpr = " << format_double(result.tpr) << '\n';
  out << "fdr = " << format_double(result.fdr) << '\n';
  out << "n_true = " << result.matches.size() << '\n';
  out << "n_identified = " << result.n_identified << '\n';
  out << "n_false_positive = " << result.n_false_positive << '\n';
  out << "true_mz,matched_mz\n";
  for (const auto& m : result.matches) {
    out << format_double(m.true_mz) << ',' << optional_field(m.matched_mz) << '\n';
  }
  text::write_file(path, out.str());
}

void write_summary(const std::filesystem::path& path, const PosteriorSummary& summary,
                   const std::string& header) {
  std::ostringstream out;
  put_header(out, header);
  out << "quantity,mean,sd\n";
  const auto row = [&](std::string_view name, const PosteriorSummary::Moments& m) {
    out << name << ',' << format_double(m.mean) << ',' << format_double(m.sd) << '\n';
  };
  row("s", summary.s);
  row("phi", summary.phi);
  row("R", summary.big_r);
  row("eta0", summary.eta0);
  row("omega0", summary.omega0);
  row("J_PM", summary.j);
  out << "J_HP," << summary.j_hp << ",NA\n";
  out << "J_DV," << summary.j_dv << ",NA\n";
  text::write_file(path, out.str());
}

void write_samples(const std::filesystem::path& path, const PosteriorSamples& samples, double gamma,
                   const std::string& header) {
  std::ostringstream out;
  put_header(out, header);
  out << "# samples kernel=" << kernel_name(samples.kind) << " xi_a=" << format_double(samples.xi_a)
      << " xi_b=" << format_double(samples.xi_b) << " gamma=" << format_double(gamma) << '\n';
  out << "iteration,log_posterior,J,s,phi,R,omega0,eta0,triplets\n";
  for (const auto& d : samples.draws) {
    const auto& st = d.state;
    out << d.iteration << ',' << format_double(d.log_posterior) << ',' << st.peaks.size() << ','
        << format_double(st.s) << ',' << format_double(st.phi) << ',' << format_double(st.big_r) << ','
        << format_double(st.bg.omega0) << ',' << format_double(st.bg.eta0);
    for (const auto& p : st.peaks) {
      out << ',' << format_double(p.tau) << ',' << format_double(p.rho) << ',' << format_double(p.eta);
    }
    out << '\n';
  }
  text::write_file(path, out.str());
}

PosteriorSamples read_samples(const std::filesystem::path& path) {
  const auto content = text::read_file(path);
  const std::string origin = path.string();
  PosteriorSamples samples;
  double gamma = 1.0;
  bool saw_header = false;
  for (auto line : lines_of(content)) {
    if (line.front() == '#') {
      constexpr std::string_view tag = "# samples ";
      if (line.substr(0, tag.size()) != tag) continue;
      for (auto field : text::split_whitespace(line.substr(tag.size()))) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "kernel") samples.kind = parse_kernel(value);
        if (key == "xi_a") samples.xi_a = need_double(value, origin);
        if (key == "xi_b") samples.xi_b = need_double(value, origin);
        if (key == "gamma") gamma = need_double(value, origin);
      }
      continue;
    }
    if (!saw_header) {
      if (line.substr(0, 10) != "iteration,") {
        throw Error(ErrorCategory::schema, origin + ": missing samples header");
      }
      saw_header = true;
      continue;
    }
    const auto fields = text::split_fields(line);
    if (fields.size() < 8) throw Error(ErrorCategory::schema, origin + ": short samples row");
    Draw d;
    const auto it = text::parse_int(fields[0]);
    const auto j = text::parse_int(fields[2]);
    if (!it || !j || *j < 0) throw Error(ErrorCategory::schema, origin + ": bad samples row");
    if (fields.size() != 8 + 3 * static_cast<std::size_t>(*j)) {
      throw Error(ErrorCategory::schema, origin + ": triplet count does not match J");
    }
    d.iteration = *it;
    d.log_posterior = need_double(fields[1], origin);
    d.state.gamma = gamma;
    d.state.s = need_double(fields[3], origin);
    d.state.phi = need_double(fields[4], origin);
    d.state.big_r = need_double(fields[5], origin);
    d.state.bg.omega0 = need_double(fields[6], origin);
    d.state.bg.eta0 = need_double(fields[7], origin);
    for (long long k = 0; k < *j; ++k) {
      const auto base = 8 + 3 * static_cast<std::size_t>(k);
      d.state.peaks.push_back({need_double(fields[base], origin), need_double(fields[base + 1], origin),
                               need_double(fields[base + 2], origin)});
    }
    samples.draws.push_back(std::move(d));
  }
  if (!saw_header) throw Error(ErrorCategory::schema, origin + ": missing samples header");
  return samples;
}

void write_move_stats(const std::filesystem::path& path, const MoveStats& stats,
                      const std::string& header) {
  std::ostringstream out;
  put_header(out, header);
  out << "move,proposed,accepted\n";
  for (std::size_t m = 0; m < kNumMoveTypes; ++m) {
    out << move_name(static_cast<MoveType>(m)) << ',' << stats.moves[m].proposed << ','
        << stats.moves[m].accepted << '\n';
  }
  for (std::size_t c = 0; c < stats.fixed_components.size(); ++c) {
    out << "fixed_dim." << fixed_component_name(c) << ',' << stats.fixed_components[c].proposed << ','
        << stats.fixed_components[c].accepted << '\n';
  }
  out << "total," << stats.total_proposed() << ",NA\n";
  text::write_file(path, out.str());
}

void write_curve(const std::filesystem::path& path, std::span<const double> grid,
                 std::span<const double> values, std::string_view value_name,
                 const std::string& header) {
  if (grid.size() != values.size()) {
    throw Error(ErrorCategory::invalid_argument, "curve grid and values differ in length");
  }
  std::ostringstream out;
  put_header(out, header);
  out << "tof," << value_name << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << format_double(grid[i]) << ',' << format_double(values[i]) << '\n';
  }
  text::write_file(path, out.str());
}

}  // namespace larkms
