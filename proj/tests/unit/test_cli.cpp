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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "larkms/cli/commands.hpp"
#include "larkms/error.hpp"
#include "larkms/simulate.hpp"
#include "oracles.hpp"

namespace larkms::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Synthetic Gaussian-noise spectrum with three peaks and a decaying background.
fs::path make_spectrum(const fs::path& dir) {
  TruthSpec t;
  t.grid = {30.0, 60.0, 1500};
  t.calib = {2.2222, 0.0};
  t.peaks = {{36.0, 250.0, 1.0}, {45.0, 250.0, 1.5}, {52.0, 250.0, 0.8}};
  t.background = BackgroundParams{3.0, 0.5};
  t.xi_a = 30.0;
  t.s = 0.7;
  t.gamma = 10.0;
  t.sigma = 0.2;
  write_truth_record(dir / "truth.txt", t);
  const auto out = generate_spectrum(t, KernelKind::gaussian, 4);
  write_spectrum(dir / "spectrum.csv", out.replicates[0]);
  return dir / "spectrum.csv";
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LARKMS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------- elicit

TEST(Elicit, AbundanceFromNuAndWindow) {
  const auto dir = larkms::testing::scratch_dir("cli_elicit");
  const auto spec = make_spectrum(dir);
  write_text(dir / "base.cfg", "xi_a = 30\nxi_b = 60\ncalib_u = 2.2222\nlikelihood = normal\n");
  ElicitOptions opt;
  opt.spectrum = spec;
  opt.config = dir / "base.cfg";
  opt.out = dir / "a.cfg";
  opt.nu_j = 20.0;
  const auto cfg = cmd_elicit(opt);
  const double eps = 0.075 * 30.0 / 20.0;
  EXPECT_NEAR(cfg.get_double("eps"), eps, 1e-12);
  EXPECT_NEAR(cfg.get_double("lambda") * eps, 0.0226908592, 1e-9);
  EXPECT_EQ(cfg.get_double("a_phi"), 0.25);
  EXPECT_EQ(cfg.get_string("likelihood"), "normal");
  opt.out = dir / "b.cfg";
  (void)cmd_elicit(opt);
  EXPECT_EQ(slurp(dir / "a.cfg"), slurp(dir / "b.cfg"));
  EXPECT_NE(slurp(dir / "a.cfg").find("# data-derived"), std::string::npos);
}

TEST(Elicit, MissingNuJIsNamedError) {
  const auto dir = larkms::testing::scratch_dir("cli_elicit_missing");
  ElicitOptions opt;
  opt.spectrum = make_spectrum(dir);
  opt.out = dir / "x.cfg";
  opt.noise_region = std::pair{55.0, 60.0};
  try {
    (void)cmd_elicit(opt);
    FAIL();
  } catch (const ElicitationError& e) {
    EXPECT_EQ(e.key(), "nu_J");
  }
  EXPECT_FALSE(fs::exists(dir / "x.cfg"));
}

// ---------------------------------------------------------------- fit

fs::path elicited_config(const fs::path& dir) {
  const auto spec = make_spectrum(dir);
  write_text(dir / "base.cfg",
             "xi_a = 30\nxi_b = 60\ncalib_u = 2.2222\nlikelihood = normal\nkernel = gaussian\n"
             "bg_tof_lo = 30\nbg_tof_hi = 34\niterations = 4000\nburnin = 2000\nthin = 10\nmu_R = 250\n");
  ElicitOptions opt;
  opt.spectrum = spec;
  opt.config = dir / "base.cfg";
  opt.out = dir / "run.cfg";
  opt.nu_j = 5.0;
  (void)cmd_elicit(opt);
  return dir / "run.cfg";
}

TEST(Fit, OutputTreeIsReproducible) {
  const auto dir = larkms::testing::scratch_dir("cli_fit");
  const auto cfg = elicited_config(dir);
  FitOptions opt;
  opt.spectrum = dir / "spectrum.csv";
  opt.config = cfg;
  opt.seed = 11;
  opt.rho_min = 100.0;
  opt.out = dir / "a";
  const auto res = cmd_fit(opt);
  opt.out = dir / "b";
  (void)cmd_fit(opt);
  for (const char* f : {"samples.csv", "peaks_hp.csv", "peaks_ma.csv", "peaks_hp_filtered.csv", "curve_mean.csv",
                        "curve_deriv.csv", "summary.csv", "move_stats.csv", "status.txt"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir / "a" / "status.txt").find("status = ok"), std::string::npos);
  const auto summary = slurp(dir / "a" / "summary.csv");
  for (const char* row : {"s,", "phi,", "R,", "eta0,", "omega0,", "J_PM,", "J_HP,", "J_DV,"}) {
    EXPECT_NE(summary.find(row), std::string::npos) << row;
  }
  EXPECT_EQ(res.samples.draws.size(), 200u);
  EXPECT_EQ(read_peak_report(dir / "a" / "peaks_hp.csv"), res.hp);

  opt.seed = 12;
  opt.out = dir / "c";
  (void)cmd_fit(opt);
  EXPECT_NE(slurp(dir / "a" / "samples.csv"), slurp(dir / "c" / "samples.csv"));
}

TEST(Fit, BadConfigValueIsSchemaError) {
  const auto dir = larkms::testing::scratch_dir("cli_fit_bad");
  const auto cfg = elicited_config(dir);
  write_text(dir / "bad.cfg", slurp(cfg) + "thin = 0\n");
  FitOptions opt;
  opt.spectrum = dir / "spectrum.csv";
  opt.config = dir / "bad.cfg";
  opt.out = dir / "out";
  EXPECT_THROW((void)cmd_fit(opt), Error);
}

// ---------------------------------------------------------------- simulate

TEST(Simulate, DelegatesToGenerator) {
  const auto dir = larkms::testing::scratch_dir("cli_sim");
  TruthSpec t;
  t.grid = {20.0, 40.0, 101};
  t.peaks = {{30.0, 200.0, 1.0}};
  t.sigma = 0.05;
  t.n_replicates = 2;
  write_truth_record(dir / "in.txt", t);
  SimulateOptions opt;
  opt.config = dir / "in.txt";
  opt.out = dir / "out";
  opt.seed = 21;
  opt.kernel = "gaussian";
  const auto out = cmd_simulate(opt);
  const auto direct = generate_spectrum(t, KernelKind::gaussian, 21);
  ASSERT_EQ(out.replicates.size(), 2u);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_TRUE(std::equal(out.replicates[r].intensity().begin(), out.replicates[r].intensity().end(),
                           direct.replicates[r].intensity().begin()));
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "replicate_000.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "replicate_001.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "mean.csv"));
  EXPECT_EQ(read_truth_record(dir / "out" / "truth.txt"), t);
}

// ---------------------------------------------------------------- evaluate

struct EvalCase {
  std::vector<double> identified;
  std::vector<double> truth;
  double tpr;
  double fdr;
};

TEST(Evaluate, ThroughFiles) {
  const auto dir = larkms::testing::scratch_dir("cli_eval");
  const std::vector<EvalCase> cases{
      {{10020, 15000}, {10000, 20000}, 0.5, 0.5},
      {{5000, 8000}, {5000, 8000}, 1.0, 0.0},
      {{}, {5000}, 0.0, 0.0},
  };
  int k = 0;
  for (const auto& c : cases) {
    const Calibration calib{1.0, 0.0};
    PeakReport rep;
    for (double m : c.identified) rep.peaks.push_back({mz_to_tof(m, calib), m, 1.0, 200.0});
    TruthSpec t;
    t.grid = {1.0, 200.0, 11};
    for (double m : c.truth) t.peaks.push_back({mz_to_tof(m, calib), 200.0, 1.0});
    const auto tag = std::to_string(k++);
    write_peak_report(dir / ("r" + tag + ".csv"), rep);
    write_truth_record(dir / ("t" + tag + ".txt"), t);
    EvaluateOptions opt{dir / ("r" + tag + ".csv"), dir / ("t" + tag + ".txt"), dir / ("m" + tag + ".csv")};
    const auto res = cmd_evaluate(opt);
    EXPECT_NEAR(res.tpr, c.tpr, 1e-12) << tag;
    EXPECT_NEAR(res.fdr, c.fdr, 1e-12) << tag;
    EXPECT_NE(slurp(opt.out).find("tpr"), std::string::npos);
  }
  EvaluateOptions wide{dir / "r0.csv", dir / "t0.txt", dir / "wide.csv", 0.01};
  EXPECT_GE(cmd_evaluate(wide).tpr, 0.5);
  EvaluateOptions missing{dir / "r0.csv", dir / "nope.txt", dir / "x.csv"};
  try {
    (void)cmd_evaluate(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::io);
    EXPECT_NE(std::string(e.what()).find("nope.txt"), std::string::npos);
  }
}

// ---------------------------------------------------------------- process contract

TEST(Process, ExitCodes) {
  const auto dir = larkms::testing::scratch_dir("cli_proc");
  const auto spec = make_spectrum(dir);
  EXPECT_EQ(run_cli("--version"), 0);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("fit --spectrum " + spec.string()), 2);
  EXPECT_EQ(run_cli("evaluate --report " + (dir / "none.csv").string() + " --truth " +
                    (dir / "truth.txt").string() + " --out " + (dir / "m.csv").string()),
            exit_code(ErrorCategory::io));
  EXPECT_EQ(run_cli("elicit --spectrum " + spec.string() + " --out " + (dir / "e.cfg").string() +
                    " --noise-region 55:60"),
            exit_code(ErrorCategory::elicitation));
  EXPECT_EQ(run_cli("elicit --spectrum " + spec.string() + " --out " + (dir / "e.cfg").string() +
                    " --noise-region 55:60 --nu-j 10 --likelihood normal"),
            exit_code(ErrorCategory::elicitation));  // no background window or calibration
  write_text(dir / "garbage.csv", "tof,intensity\n1,2\nx,y\n");
  EXPECT_EQ(run_cli("elicit --spectrum " + (dir / "garbage.csv").string() + " --out " +
                    (dir / "g.cfg").string() + " --nu-j 10"),
            exit_code(ErrorCategory::parse));
}

TEST(Process, IntervalParsing) {
  EXPECT_EQ(parse_interval("1.5:2.5"), (std::pair{1.5, 2.5}));
  EXPECT_THROW((void)parse_interval("3:1"), Error);
  EXPECT_THROW((void)parse_interval("abc"), Error);
}

TEST(Process, Sha256OfKnownBytes) {
  const auto dir = larkms::testing::scratch_dir("cli_sha");
  write_text(dir / "abc.txt", "abc");
  EXPECT_EQ(sha256_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace larkms::cli
