/*
   Copyright 2026 The jdsde Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "drift.hpp"
#include "errors.hpp"
#include "noise.hpp"
#include "probe.hpp"
#include "schemes.hpp"
#include "study.hpp"
#include "transform.hpp"

namespace jdsde {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip text for a double.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV file with a provenance comment line followed by a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& command,
            const ExperimentConfig& config, const std::vector<std::string>& columns)
      : path_(path), out_(path) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << "# jdsde version=" << kVersion << " command=" << command << " seed=" << config.seed
         << " config_hash=" << config_hash(config) << '\n';
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    if (!out_) throw IoError("write failed on " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct RunContext {
  ExperimentConfig config;
  std::filesystem::path output_dir = ".";
  unsigned threads = 1;
  bool dump_noise = false;
};

inline JumpDiffusionProblem make_problem(const ExperimentConfig& c) {
  return JumpDiffusionProblem(make_drift(c.drift), c.xi, c.lambda);
}

/// Sampled tables of G, G', mu~, sigma~, rho~ on a grid around the
/// breakpoints; breakpoints themselves are always rows.
inline std::filesystem::path run_inspect_transform(const RunContext& ctx, std::ostream& log) {
  const auto problem = make_problem(ctx.config);
  const auto tc = TransformedCoefficients::build(problem.drift, ctx.config.safety_fraction);
  const auto bps = problem.drift.breakpoints();
  const double lo = (bps.empty() ? 0.0 : bps.front()) - 1.0;
  const double hi = (bps.empty() ? 0.0 : bps.back()) + 1.0;
  std::set<double> xs(bps.begin(), bps.end());
  constexpr int kSteps = 400;
  for (int i = 0; i <= kSteps; ++i) xs.insert(lo + (hi - lo) * i / kSteps);
  const auto path = ctx.output_dir / "transform.csv";
  CsvWriter csv(path, "inspect-transform", ctx.config,
                {"x", "G", "Gp", "z", "mu_t", "sigma_t", "rho_t"});
  const auto& g = tc.transform();
  for (double x : xs) {
    const double z = g.value(x);
    csv.row({fmt_double(x), fmt_double(z), fmt_double(g.derivative(x)), fmt_double(z),
             fmt_double(tc.mu_tilde(z)), fmt_double(tc.sigma_tilde(z)), fmt_double(tc.rho_tilde(z))});
  }
  log << "inspect-transform: c=" << fmt_double(g.bump_halfwidth()) << " rows=" << xs.size()
      << " -> " << path.string() << '\n';
  return path;
}

/// Terminal values of one scheme per path. With dump_noise, the master-grid
/// noise of each path also goes to noise/path_<i>.csv.
inline std::filesystem::path run_simulate(const RunContext& ctx, std::ostream& log) {
  const auto& c = ctx.config;
  const auto problem = make_problem(c);
  const auto tc = TransformedCoefficients::build(problem.drift, c.safety_fraction);
  const auto scheme = parse_scheme(c.scheme);
  std::vector<double> x1(c.paths);
  std::vector<std::size_t> jumps(c.paths);
  if (ctx.dump_noise) std::filesystem::create_directories(ctx.output_dir / "noise");
  parallel_for(c.paths, ctx.threads, [&](std::size_t p) {
    const auto noise = sample_driving_noise(c.lambda, c.n_ref, {c.seed, p});
    x1[p] = terminal_value(approximate(scheme, problem, tc, noise, c.n));
    jumps[p] = noise.jump_count();
    if (ctx.dump_noise) {
      CsvWriter csv(ctx.output_dir / "noise" / ("path_" + std::to_string(p) + ".csv"),
                    "simulate", c, {"t", "dW", "is_jump"});
      const auto& grid = noise.master_grid();
      const auto inc = noise.brownian_increments();
      for (std::size_t i = 0; i < grid.size(); ++i)
        csv.row({fmt_double(grid.nodes[i]), fmt_double(i ? inc[i - 1] : 0.0),
                 grid.is_jump[i] ? "1" : "0"});
    }
  });
  const auto path = ctx.output_dir / ("simulate_" + c.scheme + "_n" + std::to_string(c.n) + ".csv");
  CsvWriter csv(path, "simulate", c, {"path", "X1", "jumps"});
  for (std::size_t p = 0; p < c.paths; ++p)
    csv.row({std::to_string(p), fmt_double(x1[p]), std::to_string(jumps[p])});
  const auto est = mean_and_std_error(x1);
  log << "simulate: scheme=" << c.scheme << " n=" << c.n << " paths=" << c.paths
      << " mean(X1)=" << fmt_double(est.mean) << " -> " << path.string() << '\n';
  return path;
}

inline ConvergenceReport run_convergence_command(const RunContext& ctx, std::ostream& log) {
  const auto& c = ctx.config;
  const auto problem = make_problem(c);
  StudySettings s;
  s.scheme = parse_scheme(c.scheme);
  s.resolutions = c.resolutions;
  s.n_ref = c.n_ref;
  s.paths = c.paths;
  s.seed = c.seed;
  s.metric = parse_metric(c.metric);
  s.safety_fraction = c.safety_fraction;
  s.reference_bias_check = c.reference_bias_check;
  s.threads = ctx.threads;
  const auto report = run_convergence(problem, s);

  std::vector<std::string> cols{"n", "error", "stderr"};
  if (c.reference_bias_check) {
    cols.push_back("error_2x_ref");
    cols.push_back("bias_shift");
  }
  CsvWriter csv(ctx.output_dir / "convergence.csv", "convergence", c, cols);
  for (std::size_t i = 0; i < report.resolutions.size(); ++i) {
    std::vector<std::string> row{std::to_string(report.resolutions[i]),
                                 fmt_double(report.errors[i]), fmt_double(report.std_errors[i])};
    if (c.reference_bias_check) {
      row.push_back(fmt_double(report.errors_fine_reference[i]));
      row.push_back(fmt_double(report.bias_shift[i]));
    }
    csv.row(row);
  }
  nlohmann::ordered_json summary{
      {"slope", report.slope},
      {"slope_ci", {report.slope_ci_low, report.slope_ci_high}},
      {"intercept_log2", report.intercept},
      {"scheme", c.scheme},
      {"metric", c.metric},
      {"drift", c.drift.kind},
      {"lambda", c.lambda},
      {"xi", c.xi},
      {"paths", c.paths},
      {"seed", c.seed},
      {"n_ref", c.n_ref},
      {"config_hash", config_hash(c)},
      {"version", kVersion}};
  std::ofstream js(ctx.output_dir / "convergence_summary.json");
  if (!js) throw IoError("cannot write convergence_summary.json");
  js << summary.dump(2) << '\n';
  log << "convergence: scheme=" << c.scheme << " slope=" << fmt_double(report.slope) << " ci=["
      << fmt_double(report.slope_ci_low) << ", " << fmt_double(report.slope_ci_high) << "]\n";
  return report;
}

inline ProbeReport run_probe_command(const RunContext& ctx, std::ostream& log) {
  const auto& c = ctx.config;
  const auto problem = make_problem(c);
  ProbeSettings s;
  s.resolutions = c.probe.resolutions;
  s.samples = c.probe.samples;
  s.k = c.probe.k;
  s.n_ref = c.probe.n_ref;
  s.seed = c.seed;
  s.safety_fraction = c.safety_fraction;
  s.baseline = parse_probe_baseline(c.probe.baseline);
  s.threads = ctx.threads;
  const auto report = probe_lower_bound(problem, s);
  CsvWriter csv(ctx.output_dir / "probe.csv", "probe-lower-bound", c,
                {"n", "residual", "stderr", "M", "k"});
  for (std::size_t i = 0; i < report.resolutions.size(); ++i)
    csv.row({std::to_string(report.resolutions[i]), fmt_double(report.residuals[i]),
             fmt_double(report.std_errors[i]), std::to_string(report.samples_used),
             std::to_string(report.k)});
  log << "probe-lower-bound: slope=" << fmt_double(report.slope) << " M=" << report.samples_used
      << " dropped=" << report.samples_dropped << " jump_width=" << report.jump_width << '\n';
  return report;
}

/// Dispatches one subcommand; artifacts go to ctx.output_dir.
inline void run(const std::string& command, const RunContext& ctx, std::ostream& log) {
  validate_config(ctx.config);
  std::error_code ec;
  std::filesystem::create_directories(ctx.output_dir, ec);
  if (ec) throw IoError("cannot create " + ctx.output_dir.string() + ": " + ec.message());
  if (command == "inspect-transform")
    run_inspect_transform(ctx, log);
  else if (command == "simulate")
    run_simulate(ctx, log);
  else if (command == "convergence")
    run_convergence_command(ctx, log);
  else if (command == "probe-lower-bound")
    run_probe_command(ctx, log);
  else
    throw ConfigurationError("unknown command '" + command + "'");
}

}  // namespace jdsde
