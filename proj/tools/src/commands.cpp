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

#include "larkms/cli/commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "larkms/error.hpp"
#include "larkms/initializer.hpp"
#include "larkms/text_io.hpp"

#ifndef LARKMS_VERSION
#define LARKMS_VERSION "0.0.0"
#endif

namespace larkms::cli {

namespace {

namespace fs = std::filesystem;

std::string header_line(std::string_view command, std::optional<std::uint64_t> seed,
                        std::initializer_list<std::pair<std::string_view, fs::path>> inputs) {
  std::ostringstream out;
  out << "larkms " << version() << " command=" << command;
  if (seed) out << " seed=" << *seed;
  for (const auto& [name, path] : inputs) out << ' ' << name << "_sha256=" << sha256_file(path);
  return out.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCategory::io, "cannot create output directory: " + dir.string());
  }
}

void require_file(const fs::path& path, std::string_view what) {
  if (!fs::exists(path)) {
    throw Error(ErrorCategory::io, std::string(what) + " not found: " + path.string());
  }
}

bool is_hyper_key(std::string_view key) {
  static constexpr std::string_view keys[] = {
      "nu_J", "lambda",   "eps",  "T0",   "T1",      "sigma2_rho",  "mu_R",          "sigma2_R",
      "a_phi", "b_phi",   "a_s",  "b_s",  "lambda0", "omega0_hat", "sigma2_omega0", "gamma"};
  return std::find(std::begin(keys), std::end(keys), key) != std::end(keys);
}

}  // namespace

std::string_view version() noexcept { return LARKMS_VERSION; }

std::string sha256_file(const fs::path& path) {
  const auto bytes = text::read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCategory::io, "sha256 failed for " + path.string());
  }
  std::string hex;
  hex.reserve(2 * len);
  constexpr char digits[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(digits[digest[i] >> 4]);
    hex.push_back(digits[digest[i] & 0xF]);
  }
  return hex;
}

int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::io: return 3;
    case ErrorCategory::parse: return 4;
    case ErrorCategory::invalid_argument: return 5;
    case ErrorCategory::domain: return 6;
    case ErrorCategory::elicitation: return 7;
    case ErrorCategory::sampler: return 8;
    case ErrorCategory::schema: return 9;
  }
  return 1;
}

std::pair<double, double> parse_interval(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCategory::invalid_argument, "interval must be lo:hi");
  }
  const auto lo = text::parse_double(text::trim(text.substr(0, colon)));
  const auto hi = text::parse_double(text::trim(text.substr(colon + 1)));
  if (!lo || !hi || !(*hi > *lo)) {
    throw Error(ErrorCategory::invalid_argument, "interval must be lo:hi with lo < hi");
  }
  return {*lo, *hi};
}

RunConfig run_config_from(const KeyValueConfig& cfg) {
  RunConfig rc;
  rc.kernel = parse_kernel(cfg.get_string_or("kernel", "cauchy"));
  rc.likelihood = parse_likelihood(cfg.get_string_or("likelihood", "gamma"));
  rc.sample_variance = cfg.get_bool_or("sample_variance", false);
  if (cfg.has("sigma")) rc.sigma = cfg.get_double("sigma");
  auto& ch = rc.chain;
  ch.n_iter = cfg.get_int_or("iterations", ch.n_iter);
  ch.n_burn = cfg.get_int_or("burnin", ch.n_burn);
  ch.thin = cfg.get_int_or("thin", ch.thin);
  ch.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", static_cast<long long>(ch.seed)));
  auto& mp = ch.moves;
  mp.birth = cfg.get_double_or("move_birth", mp.birth);
  mp.death = cfg.get_double_or("move_death", mp.death);
  mp.update = cfg.get_double_or("move_update", mp.update);
  mp.split = cfg.get_double_or("move_split", mp.split);
  mp.merge = cfg.get_double_or("move_merge", mp.merge);
  mp.fixed_dim = cfg.get_double_or("move_fixed_dim", mp.fixed_dim);
  auto& sc = ch.scales;
  sc.tau = cfg.get_double_or("rw_tau", sc.tau);
  sc.log_rho = cfg.get_double_or("rw_log_rho", sc.log_rho);
  sc.log_eta = cfg.get_double_or("rw_log_eta", sc.log_eta);
  sc.logit_s = cfg.get_double_or("rw_logit_s", sc.logit_s);
  sc.log_phi = cfg.get_double_or("rw_log_phi", sc.log_phi);
  sc.log_r = cfg.get_double_or("rw_log_R", sc.log_r);
  sc.log_omega0 = cfg.get_double_or("rw_log_omega0", sc.log_omega0);
  sc.log_eta0 = cfg.get_double_or("rw_log_eta0", sc.log_eta0);
  sc.joint_log_rho = cfg.get_double_or("rw_joint_log_rho", sc.joint_log_rho);
  rc.calib.u = cfg.get_double_or("calib_u", rc.calib.u);
  rc.calib.t0 = cfg.get_double_or("calib_t0", rc.calib.t0);
  rc.n_shots = static_cast<int>(cfg.get_int_or("n_shots", 1));
  rc.standardize = cfg.get_bool_or("standardize", true);
  rc.ma_refine = static_cast<int>(cfg.get_int_or("ma_refine", 1));
  if (cfg.has("rho_min")) rc.rho_min = cfg.get_double("rho_min");
  if (rc.n_shots < 1) throw Error(ErrorCategory::schema, "n_shots must be at least 1");
  if (rc.ma_refine < 1) throw Error(ErrorCategory::schema, "ma_refine must be at least 1");
  return rc;
}

Spectrum prepare_spectrum(const fs::path& path, const RunConfig& rc, const KeyValueConfig& cfg) {
  require_file(path, "spectrum");
  const auto raw = load_spectrum(path, rc.n_shots);
  Spectrum spec;
  if (rc.standardize) {
    spec = standardize(raw);
  } else {
    std::vector<double> t;
    std::vector<double> y;
    for (const auto& s : raw.ticks) {
      t.push_back(s.tof);
      y.push_back(s.intensity);
    }
    spec = Spectrum(std::move(t), std::move(y));
  }
  if (cfg.has("T0") && cfg.has("T1")) spec = clip_range(spec, cfg.get_double("T0"), cfg.get_double("T1"));
  return spec;
}

KeyValueConfig cmd_elicit(const ElicitOptions& opt) {
  KeyValueConfig base;
  if (opt.config) base = KeyValueConfig::load(*opt.config);
  if (opt.likelihood) base.set("likelihood", *opt.likelihood);
  const auto rc = run_config_from(base);
  const auto spec = prepare_spectrum(opt.spectrum, rc, base);

  KeyValueConfig out;
  for (const auto& e : base.entries()) {
    if (!is_hyper_key(e.key)) out.set(e.key, e.value, e.comment);
  }
  const auto user = [&](std::string_view key) { return base.has(key); };
  const auto put = [&](std::string_view key, double derived, std::string_view provenance) {
    if (user(key)) {
      out.set(key, base.get_double(key), "user");
      return base.get_double(key);
    }
    out.set(key, derived, std::string(provenance));
    return derived;
  };

  Hyperparameters def;
  const double t0 = put("T0", spec.range_lo(), "data-derived");
  const double t1 = put("T1", spec.range_hi(), "data-derived");
  double nu_j = 0.0;
  if (opt.nu_j) {
    nu_j = *opt.nu_j;
    out.set("nu_J", nu_j, "flag");
  } else if (user("nu_J")) {
    nu_j = put("nu_J", 0.0, "");
  } else {
    throw ElicitationError("nu_J", "expected peak count has no default: pass --nu-j or set nu_J");
  }
  const auto [lambda, eps] = elicit_abundance(nu_j, t0, t1);
  put("lambda", lambda, "data-derived");
  const double eps_used = put("eps", eps, "data-derived");
  put("sigma2_rho", def.sigma2_rho, "default");
  put("mu_R", def.mu_r, "default");
  put("sigma2_R", def.sigma2_r, "default");
  put("gamma", elicit_scale(spec), "data-derived");

  if (user("a_phi") && user("b_phi")) {
    put("a_phi", 0.0, "");
    put("b_phi", 0.0, "");
  } else if (rc.likelihood == ObservationModel::gaussian) {
    const double sd = rc.sigma ? *rc.sigma : robust_noise_sd(spec);
    put("a_phi", 0.25, "default");
    put("b_phi", 0.25 * sd * sd, "data-derived");
  } else {
    try {
      const auto [a_phi, b_phi] = elicit_phi(spec);
      put("a_phi", a_phi, "default");
      put("b_phi", b_phi, "data-derived");
    } catch (const ElicitationError&) {
      throw;
    } catch (const Error& e) {
      throw ElicitationError("b_phi", std::string(e.what()) + "; set b_phi");
    }
  }

  const auto [noise_lo, noise_hi] =
      opt.noise_region ? *opt.noise_region : std::pair{t1 - 0.05 * (t1 - t0), t1};
  if (!(user("a_s") && user("b_s"))) {
    const auto [a_s, b_s] = elicit_signal_fraction(spec, noise_lo, noise_hi);
    put("a_s", a_s, "data-derived");
    put("b_s", b_s, "default");
  } else {
    put("a_s", 0.0, "");
    put("b_s", 0.0, "");
  }

  if (!(user("omega0_hat") && user("lambda0"))) {
    BackgroundEstimate bg;
    if (base.has("bg_tof_lo") && base.has("bg_tof_hi")) {
      bg = elicit_background_tof(spec, base.get_double("bg_tof_lo"), base.get_double("bg_tof_hi"),
                                 eps_used);
    } else if (base.has("calib_u")) {
      bg = elicit_background(spec, base.get_double_or("bg_mz_lo", 2000.0),
                             base.get_double_or("bg_mz_hi", 3500.0), rc.calib, eps_used);
    } else {
      throw ElicitationError("omega0_hat",
                             "background window unknown: set calib_u or bg_tof_lo/bg_tof_hi, or "
                             "set omega0_hat and lambda0");
    }
    put("omega0_hat", bg.omega0_hat, "data-derived");
    put("lambda0", bg.lambda0, "data-derived");
  } else {
    put("omega0_hat", 0.0, "");
    put("lambda0", 0.0, "");
  }
  put("sigma2_omega0", def.sigma2_omega0, "default");

  // Validate before writing.
  (void)hyperparameters_from_config(out);
  std::optional<std::uint64_t> no_seed;
  const auto header = opt.config ? header_line("elicit", no_seed,
                                               {{"spectrum", opt.spectrum}, {"config", *opt.config}})
                                 : header_line("elicit", no_seed, {{"spectrum", opt.spectrum}});
  out.save(opt.out, header);
  return out;
}

FitResult cmd_fit(const FitOptions& opt) {
  require_file(opt.config, "config");
  auto cfg = KeyValueConfig::load(opt.config);
  if (opt.kernel) cfg.set("kernel", *opt.kernel);
  if (opt.likelihood) cfg.set("likelihood", *opt.likelihood);
  if (opt.iterations) cfg.set("iterations", std::to_string(*opt.iterations));
  if (opt.burnin) cfg.set("burnin", std::to_string(*opt.burnin));
  if (opt.thin) cfg.set("thin", std::to_string(*opt.thin));
  if (opt.seed) cfg.set("seed", std::to_string(*opt.seed));
  if (opt.rho_min) cfg.set("rho_min", *opt.rho_min);
  const auto rc = run_config_from(cfg);
  const auto h = hyperparameters_from_config(cfg);
  const auto spec = prepare_spectrum(opt.spectrum, rc, cfg);

  LikelihoodKind lk{rc.likelihood, rc.sample_variance};
  auto init = init_mode_seek(spec, h, rc.kernel);
  if (rc.likelihood == ObservationModel::gaussian && !rc.sample_variance) {
    const double sd = rc.sigma ? *rc.sigma : robust_noise_sd(spec);
    if (!(sd > 0.0)) throw Error(ErrorCategory::domain, "noise sd estimate is zero; set sigma");
    init.phi = 1.0 / (sd * sd);
  }

  ensure_dir(opt.out);
  const auto header =
      header_line("fit", rc.chain.seed, {{"spectrum", opt.spectrum}, {"config", opt.config}});
  FitResult result;
  try {
    result.samples = run_chain_from(spec, h, rc.kernel, lk, rc.chain, std::move(init));
  } catch (const Error& e) {
    text::write_file(opt.out / "status.txt",
                     "# " + header + "\nstatus = failed\nreason = " + std::string(e.what()) + "\n");
    throw;
  }

  const auto grid = refine_grid(spec.tof(), rc.ma_refine);
  result.hp = hp_peaks(result.samples, rc.calib, "fit seed=" + std::to_string(rc.chain.seed));
  result.ma = ma_peaks(result.samples, grid, rc.kernel, rc.calib, result.hp.run_id);
  result.summary = summarize(result.samples, result.ma.peaks.size());
  const auto mean = posterior_mean_curve(result.samples, grid, rc.kernel, false);
  const auto deriv = posterior_mean_curve(result.samples, grid, rc.kernel, true);

  write_samples(opt.out / "samples.csv", result.samples, h.gamma_fixed, header);
  write_peak_report(opt.out / "peaks_hp.csv", result.hp, header);
  write_peak_report(opt.out / "peaks_ma.csv", result.ma, header);
  if (rc.rho_min) {
    write_peak_report(opt.out / "peaks_hp_filtered.csv", filter_by_resolution(result.hp, *rc.rho_min),
                      header);
  }
  write_curve(opt.out / "curve_mean.csv", grid, mean, "mean_intensity", header);
  write_curve(opt.out / "curve_deriv.csv", grid, deriv, "mean_intensity_deriv", header);
  write_summary(opt.out / "summary.csv", result.summary, header);
  write_move_stats(opt.out / "move_stats.csv", result.samples.move_stats, header);
  text::write_file(opt.out / "status.txt", "# " + header + "\nstatus = ok\n");
  return result;
}

SimulationOutput cmd_simulate(const SimulateOptions& opt) {
  require_file(opt.config, "truth config");
  const auto cfg = KeyValueConfig::load(opt.config);
  const auto truth = truth_from_config(cfg);
  const auto kind = parse_kernel(opt.kernel ? *opt.kernel : cfg.get_string_or("kernel", "gaussian"));
  auto out = generate_spectrum(truth, kind, opt.seed);
  ensure_dir(opt.out);
  const auto header = header_line("simulate", opt.seed, {{"config", opt.config}});
  for (std::size_t r = 0; r < out.replicates.size(); ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "replicate_%03zu.csv", r);
    write_spectrum(opt.out / name, out.replicates[r], header);
  }
  write_spectrum(opt.out / "mean.csv", mean_of_replicates(out), header);
  auto record = truth_to_config(truth);
  record.set("kernel", std::string(kernel_name(kind)));
  record.set("floored_count", std::to_string(out.n_floored), "Gaussian draws raised to zero");
  record.set("value_count", std::to_string(out.n_values));
  record.save(opt.out / "truth.txt", header);
  return out;
}

MatchResult cmd_evaluate(const EvaluateOptions& opt) {
  require_file(opt.report, "peak report");
  require_file(opt.truth, "truth record");
  const auto report = read_peak_report(opt.report);
  const auto truth = read_truth_record(opt.truth);
  const auto masses = truth.masses();
  const auto result = match_peaks(report, masses, opt.tol);
  write_match_result(opt.out, result, opt.tol,
                     header_line("evaluate", std::nullopt, {{"report", opt.report}, {"truth", opt.truth}}));
  return result;
}

}  // namespace larkms::cli
