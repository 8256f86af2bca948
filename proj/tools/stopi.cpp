// Copyright 2026 The stopi Authors
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

// Command-line driver. Every run writes out/<command>/<timestamp>/ with a
// manifest.json and the data CSVs. Exit codes: 0 ok, 1 usage, 2 check failed.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stopi/bounds.hpp"
#include "stopi/certifier.hpp"
#include "stopi/counterexample.hpp"
#include "stopi/csv.hpp"
#include "stopi/extract_search.hpp"
#include "stopi/parallel.hpp"

#ifndef STOPI_VERSION
#define STOPI_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheck = 2;

constexpr double kBetaAgreement = 1e-12;
constexpr double kSearchSlack = 1e-4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out_root = "out";
  unsigned threads = 0;
};

class Run {
 public:
  Run(const Common& common, std::string command) : command_(std::move(command)) {
    start_ = std::chrono::steady_clock::now();
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    fs::path base = fs::path(common.out_root) / command_ / stamp;
    dir_ = base;
    for (int k = 1; fs::exists(dir_); ++k) dir_ = base.string() + "-" + std::to_string(k);
    fs::create_directories(dir_);
    manifest_["command"] = command_;
    manifest_["version"] = STOPI_VERSION;
    manifest_["threads"] = stopi::resolve_threads(common.threads);
  }

  json& params() { return manifest_["parameters"]; }
  json& results() { return manifest_["results"]; }

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    manifest_["files"].push_back(name);
    return os;
  }

  void finish(int exit_code) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest_["exit_code"] = exit_code;
    manifest_["duration_seconds"] = secs;
    std::ofstream os(dir_ / "manifest.json");
    os << manifest_.dump(2) << '\n';
    std::cout << "output: " << dir_.string() << '\n';
  }

 private:
  std::string command_;
  fs::path dir_;
  json manifest_;
  std::chrono::steady_clock::time_point start_;
};

json report_json(const stopi::LemmaReport& r) {
  return {{"check_name", r.check_name},
          {"samples", r.samples},
          {"worst_slack", r.worst_slack},
          {"violations", r.violations}};
}

void print_report(const stopi::LemmaReport& r) {
  std::cout << r.check_name << ": samples=" << r.samples << " worst_slack=" << stopi::fmt17(r.worst_slack)
            << " violations=" << r.violations << '\n';
  if (r.violations > 0) {
    std::cerr << r.check_name << " worst sample #" << r.worst_sample << ": " << r.worst_detail << '\n';
  }
}

// Runs the lemma suites, writes lemmas.csv and lemmas.jsonl; returns true if clean.
bool run_lemmas(Run& run, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  std::vector<stopi::LemmaReport> reports;
  reports.push_back(stopi::check_lemma_triangle(samples, seed, threads));
  reports.push_back(stopi::check_lemma_cq_channel(samples, seed, threads));
  reports.push_back(stopi::check_lemma_spectrum(samples, seed, threads));
  reports.push_back(stopi::check_centre_bound(samples, seed, threads));
  bool clean = true;
  {
    auto csv = run.open("lemmas.csv");
    stopi::write_lemma_reports_csv(csv, reports);
  }
  auto jsonl = run.open("lemmas.jsonl");
  for (const auto& r : reports) {
    print_report(r);
    jsonl << report_json(r).dump() << '\n';
    run.results()["lemmas"].push_back(report_json(r));
    clean = clean && r.violations == 0;
  }
  return clean;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  bool paper_grid = false;
  std::vector<double> alphas;
  double alpha_min = 0.0;
  double alpha_max = 1.999;
  double alpha_step = 0.001;
  int a_points = 100;
  int b_points = 200;
  double threshold = -5e-9;
  bool full_dump = false;
};

int cmd_certify(const Common& common, const CertifyArgs& args) {
  stopi::GridSpec spec = stopi::GridSpec::paper();
  if (!args.paper_grid) {
    spec.alpha_min = args.alpha_min;
    spec.alpha_max = args.alpha_max;
    spec.alpha_step = args.alpha_step;
    spec.a_points = args.a_points;
    spec.b_points = args.b_points;
    spec.alpha_list = args.alphas;
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  Run run(common, "certify");
  run.params() = {{"paper_grid", args.paper_grid}, {"alpha_min", spec.alpha_min},
                  {"alpha_max", spec.alpha_max},   {"alpha_step", spec.alpha_step},
                  {"alpha_list", spec.alpha_list}, {"a_points", spec.a_points},
                  {"b_points", spec.b_points},     {"threshold", args.threshold},
                  {"full_dump", args.full_dump}};

  const stopi::GridReport report = stopi::grid_scan(spec, {common.threads, args.full_dump});
  {
    auto os = run.open("grid.csv");
    stopi::write_grid_csv(os, report);
  }
  {
    auto os = run.open("constants.csv");
    stopi::write_constants_csv(os, report);
  }
  if (args.full_dump) {
    auto os = run.open("cells.csv");
    stopi::write_cells_csv(os, report);
  }
  const auto& m = report.argmin;
  std::cout << "cells evaluated: " << report.cells_evaluated << '\n'
            << "global min eigenvalue: " << stopi::fmt17(report.global_min_eigenvalue) << '\n'
            << "argmin: alpha=" << stopi::fmt17(m.alpha) << " a=" << stopi::fmt17(m.a) << " b=" << stopi::fmt17(m.b)
            << " (a_index " << m.a_index << ", b_index " << m.b_index << ")\n";
  const bool ok = report.global_min_eigenvalue >= args.threshold;
  run.results() = {{"cells_evaluated", report.cells_evaluated},
                   {"global_min_eigenvalue", report.global_min_eigenvalue},
                   {"argmin", {{"alpha", m.alpha}, {"a", m.a}, {"b", m.b}, {"a_index", m.a_index}, {"b_index", m.b_index}}},
                   {"certified", ok}};
  std::cout << (ok ? "certificate holds" : "certificate FAILED") << " at threshold " << stopi::fmt17(args.threshold)
            << '\n';
  const int code = ok ? kExitOk : kExitCheck;
  run.finish(code);
  return code;
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
  double alpha = 0.0;
  std::string emit_csv;
  int resolution = 101;
  std::string comparison;
};

int cmd_bounds(const Common& common, const BoundsArgs& args) {
  if (args.resolution < 2) throw UsageError("--resolution must be at least 2");
  std::optional<stopi::TiltParameter> alpha;
  try {
    alpha.emplace(args.alpha);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  std::vector<stopi::ComparisonPoint> points;
  if (!args.comparison.empty()) {
    std::ifstream in(args.comparison);
    if (!in) throw UsageError("cannot read " + args.comparison);
    try {
      points = stopi::read_comparison_points(in);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }

  Run run(common, "bounds");
  run.params() = {{"alpha", args.alpha}, {"emit_csv", args.emit_csv}, {"resolution", args.resolution},
                  {"comparison", args.comparison}};
  const stopi::BoundFunction bound = stopi::BoundFunction::for_alpha(*alpha);
  const auto& c = bound.constants();
  std::cout << "alpha      = " << stopi::fmt17(c.alpha) << '\n'
            << "s          = " << stopi::fmt17(c.s) << '\n'
            << "mu         = " << stopi::fmt17(c.mu) << '\n'
            << "beta_C     = " << stopi::fmt17(bound.beta_c()) << '\n'
            << "beta_Q     = " << stopi::fmt17(bound.beta_q()) << '\n'
            << "beta*      = " << stopi::fmt17(bound.threshold()) << '\n'
            << "lambda0^2  = " << stopi::fmt17(bound.lambda0_sq()) << '\n';
  run.results() = {{"s", c.s},
                   {"mu", c.mu},
                   {"beta_c", bound.beta_c()},
                   {"beta_q", bound.beta_q()},
                   {"beta_star", bound.threshold()},
                   {"lambda0_sq", bound.lambda0_sq()}};

  const stopi::ComparisonTable table = stopi::emit_comparison(bound, args.resolution);
  {
    auto os = run.open("comparison.csv");
    stopi::write_comparison_csv(os, table);
  }
  if (!args.emit_csv.empty()) {
    std::ofstream os(args.emit_csv);
    if (!os) throw std::runtime_error("cannot write " + args.emit_csv);
    stopi::write_comparison_csv(os, table);
  }
  if (!args.comparison.empty()) {
    auto os = run.open("external.csv");
    stopi::write_merged_points_csv(os, bound, points);
  }
  run.finish(kExitOk);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CounterexampleArgs {
  double v = stopi::kCentreWeight;
  int restarts = 200;
  std::uint64_t seed = 42;
  std::uint64_t samples = 1000;
  int kraus = 2;
};

int cmd_counterexample(const Common& common, const CounterexampleArgs& args) {
  if (!(args.v > 0.0 && args.v < 1.0)) throw UsageError("--v must lie in (0, 1)");
  if (args.samples == 0) throw UsageError("--samples must be positive");
  stopi::SearchConfig cfg;
  cfg.restarts = args.restarts;
  cfg.seed = args.seed;
  cfg.kraus_count = args.kraus;
  cfg.threads = common.threads;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  Run run(common, "counterexample");
  run.params() = {{"v", args.v}, {"restarts", args.restarts}, {"seed", args.seed},
                  {"samples", args.samples}, {"kraus", args.kraus}};

  const stopi::CounterexampleState state = stopi::build_state(args.v);
  const double beta = stopi::chsh_value(state);
  const double closed = stopi::chsh_closed_form(args.v);
  const bool beta_ok = std::abs(beta - closed) <= kBetaAgreement;
  std::cout << "beta (36x36 contraction) = " << stopi::fmt17(beta) << '\n'
            << "beta (closed form)       = " << stopi::fmt17(closed) << '\n';

  const bool lemmas_ok = run_lemmas(run, args.samples, args.seed, common.threads);

  const stopi::ExtractionResult search =
      stopi::extractability_lower_bound(state.rho, stopi::phi_plus(), 3, 3, cfg);
  {
    auto os = run.open("search.csv");
    os << "restart,fidelity\n";
    for (std::size_t r = 0; r < search.restart_values.size(); ++r) {
      os << r << ',' << stopi::fmt17(search.restart_values[r]) << '\n';
    }
  }
  const std::array<stopi::QubitChannel, 3> alice{search.alice[0], search.alice[1], search.alice[2]};
  const std::array<stopi::QubitChannel, 3> bob{search.bob[0], search.bob[1], search.bob[2]};
  const stopi::FrameDiagnostics diag = stopi::frame_diagnostics(state, alice, bob);
  {
    auto os = run.open("frame.csv");
    os << "x,y,epsilon\n";
    for (const auto& [cell, eps] : diag.epsilon) os << cell.first << ',' << cell.second << ',' << stopi::fmt17(eps) << '\n';
  }
  // The extractability-1/2 claim only covers centre weights up to 1/597.
  const bool search_applies = args.v <= stopi::kCentreWeight;
  const bool search_ok = !search_applies || search.value <= 0.5 + kSearchSlack;
  std::cout << "search best fidelity = " << stopi::fmt17(search.value) << " (restart " << search.best_restart
            << ")\n"
            << "epsilon_wav = " << stopi::fmt17(diag.epsilon_wav)
            << ", centre fidelity = " << stopi::fmt17(diag.centre_fidelity) << '\n';
  if (!search_applies) std::cout << "search bound not checked: v exceeds 1/597\n";

  run.results()["beta"] = beta;
  run.results()["beta_closed_form"] = closed;
  run.results()["search_best"] = search.value;
  run.results()["search_best_restart"] = search.best_restart;
  run.results()["epsilon_wav"] = diag.epsilon_wav;
  run.results()["centre_fidelity"] = diag.centre_fidelity;
  run.results()["checks"] = {{"beta", beta_ok}, {"lemmas", lemmas_ok}, {"search", search_ok}};

  const int code = beta_ok && lemmas_ok && search_ok ? kExitOk : kExitCheck;
  if (code != kExitOk) std::cerr << "counterexample checks FAILED\n";
  run.finish(code);
  return code;
}

// ---------------------------------------------------------------------------

struct LemmasArgs {
  std::uint64_t samples = 1000;
  std::uint64_t seed = 7;
};

int cmd_lemmas(const Common& common, const LemmasArgs& args) {
  if (args.samples == 0) throw UsageError("--samples must be positive");
  Run run(common, "lemmas");
  run.params() = {{"samples", args.samples}, {"seed", args.seed}};
  const bool ok = run_lemmas(run, args.samples, args.seed, common.threads);
  const int code = ok ? kExitOk : kExitCheck;
  run.finish(code);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-testing bound certification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", STOPI_VERSION);
  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default: $STOPI_THREADS or all cores)");
  app.add_option("--out", common.out_root, "Root of the output tree")->capture_default_str();

  CertifyArgs cert;
  auto* certify = app.add_subcommand("certify", "Grid-check the operator inequality");
  certify->add_flag("--paper-grid", cert.paper_grid, "Full grid: alpha 0..1.999 step 0.001, 100 x 200 angles");
  certify->add_option("--alpha", cert.alphas, "Explicit alpha values (repeatable)");
  certify->add_option("--alpha-min", cert.alpha_min)->capture_default_str();
  certify->add_option("--alpha-max", cert.alpha_max)->capture_default_str();
  certify->add_option("--alpha-step", cert.alpha_step)->capture_default_str();
  certify->add_option("--a-points", cert.a_points, "Nodes on [0, pi/4]")->capture_default_str();
  certify->add_option("--b-points", cert.b_points, "Nodes on [0, pi/2]")->capture_default_str();
  certify->add_option("--threshold", cert.threshold, "Pass if the global minimum is at least this")
      ->capture_default_str();
  certify->add_flag("--full-dump", cert.full_dump, "Also write every cell to cells.csv");

  BoundsArgs bnd;
  auto* bounds = app.add_subcommand("bounds", "Print the bound constants and comparison data");
  bounds->add_option("--alpha", bnd.alpha)->capture_default_str();
  bounds->add_option("--emit-csv", bnd.emit_csv, "Also write the comparison table to this path");
  bounds->add_option("--resolution", bnd.resolution, "Rows in the comparison table")->capture_default_str();
  bounds->add_option("--comparison", bnd.comparison, "File of `beta value` lines to merge");

  CounterexampleArgs cx;
  auto* counter = app.add_subcommand("counterexample", "Build the counterexample and run its checks");
  counter->add_option("--v", cx.v, "Centre weight p11")->capture_default_str();
  counter->add_option("--restarts", cx.restarts)->capture_default_str();
  counter->add_option("--seed", cx.seed)->capture_default_str();
  counter->add_option("--samples", cx.samples, "Samples per lemma suite")->capture_default_str();
  counter->add_option("--kraus", cx.kraus, "Kraus operators per searched channel (1-4)")->capture_default_str();

  LemmasArgs lm;
  auto* lemmas = app.add_subcommand("lemmas", "Run the lemma property suites");
  lemmas->add_option("--samples", lm.samples)->capture_default_str();
  lemmas->add_option("--seed", lm.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*certify) return cmd_certify(common, cert);
    if (*bounds) return cmd_bounds(common, bnd);
    if (*counter) return cmd_counterexample(common, cx);
    if (*lemmas) return cmd_lemmas(common, lm);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheck;
  }
  return kExitUsage;
}
