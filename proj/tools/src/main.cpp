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

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "larkms/cli/commands.hpp"
#include "larkms/error.hpp"

namespace {

void fail(std::string_view category, std::string_view message) {
  std::string line(message);
  for (auto& c : line) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "error: " << category << ": " << line << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace larkms::cli;
  CLI::App app{"Bayesian peak detection for MALDI-TOF spectra"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  ElicitOptions el;
  std::optional<std::string> el_noise;
  auto* elicit = app.add_subcommand("elicit", "Fill a prior config from a spectrum");
  elicit->add_option("--spectrum", el.spectrum, "Spectrum file")->required();
  elicit->add_option("--config", el.config, "Base config (optional)");
  elicit->add_option("--out", el.out, "Output config path")->required();
  elicit->add_option("--nu-j", el.nu_j, "Expected number of peaks");
  elicit->add_option("--noise-region", el_noise, "Noise TOF interval lo:hi (µs)");
  elicit->add_option("--likelihood", el.likelihood, "gamma or normal");

  FitOptions fit;
  auto* fitc = app.add_subcommand("fit", "Run the sampler and write reports");
  fitc->add_option("--spectrum", fit.spectrum, "Spectrum file")->required();
  fitc->add_option("--config", fit.config, "Config from elicit")->required();
  fitc->add_option("--out", fit.out, "Output directory")->required();
  fitc->add_option("--kernel", fit.kernel, "gaussian or cauchy");
  fitc->add_option("--likelihood", fit.likelihood, "gamma or normal");
  fitc->add_option("--iterations", fit.iterations, "Total iterations");
  fitc->add_option("--burnin", fit.burnin, "Burn-in iterations");
  fitc->add_option("--thin", fit.thin, "Thinning stride");
  fitc->add_option("--seed", fit.seed, "Random seed");
  fitc->add_option("--rho-min", fit.rho_min, "Resolution threshold for the filtered HP report");

  SimulateOptions sim;
  auto* simc = app.add_subcommand("simulate", "Generate synthetic spectra from a truth config");
  simc->add_option("--config", sim.config, "Truth config")->required();
  simc->add_option("--out", sim.out, "Output directory")->required();
  simc->add_option("--seed", sim.seed, "Random seed");
  simc->add_option("--kernel", sim.kernel, "gaussian or cauchy");

  EvaluateOptions ev;
  auto* evc = app.add_subcommand("evaluate", "Match a peak report against a truth record");
  evc->add_option("--report", ev.report, "Peak report")->required();
  evc->add_option("--truth", ev.truth, "Truth record")->required();
  evc->add_option("--out", ev.out, "Match result path")->required();
  evc->add_option("--tol", ev.tol, "Relative mass tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", e.what());
    return 2;
  }

  try {
    if (*elicit) {
      if (el_noise) el.noise_region = parse_interval(*el_noise);
      cmd_elicit(el);
    } else if (*fitc) {
      cmd_fit(fit);
    } else if (*simc) {
      cmd_simulate(sim);
    } else if (*evc) {
      const auto r = cmd_evaluate(ev);
      std::printf("tpr %.6g fdr %.6g\n", r.tpr, r.fdr);
    }
  } catch (const larkms::ElicitationError& e) {
    fail("elicitation", std::string(e.what()) + " (override key: " + e.key() + ")");
    return exit_code(e.category());
  } catch (const larkms::Error& e) {
    fail(larkms::category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    fail("internal", e.what());
    return 1;
  }
  return 0;
}
