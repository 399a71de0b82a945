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

// jdsde: command-line front end for the jump-diffusion experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <jdsde/commands.hpp>
#include <jdsde/config.hpp>
#include <jdsde/errors.hpp>

namespace {

struct Overrides {
  std::string config_path;
  std::string out;
  std::optional<unsigned> threads;
  std::optional<std::string> drift;
  std::optional<double> xi;
  std::optional<double> lambda;
  std::optional<std::string> scheme;
  std::optional<std::int64_t> n;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  std::vector<std::int64_t> resolutions;
  std::optional<std::int64_t> n_ref;
  std::optional<double> safety_fraction;
  std::optional<std::string> metric;
  bool bias_check = false;
  std::vector<std::int64_t> probe_resolutions;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> k;
  std::optional<std::int64_t> probe_n_ref;
  std::optional<std::string> probe_baseline;
  bool dump_noise = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "YAML experiment config");
  cmd->add_option("-o,--out", o.out, "Output directory (default: $JDSDE_OUTPUT_DIR or ./jdsde-out)");
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = all cores (default: $JDSDE_THREADS or 0)");
  cmd->add_option("--drift", o.drift, "Catalog token (neg-sign[:a], zero, linear:s[:o]) or YAML drift file");
  cmd->add_option("--xi", o.xi, "Initial value");
  cmd->add_option("--lambda", o.lambda, "Jump intensity");
  cmd->add_option("--seed", o.seed, "Experiment seed");
  cmd->add_option("--safety-fraction", o.safety_fraction, "Bump half-width as a fraction of its bound");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw jdsde::IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

jdsde::ExperimentConfig build_config(const Overrides& o) {
  auto c = o.config_path.empty() ? jdsde::ExperimentConfig{}
                                 : jdsde::parse_config(read_file(o.config_path));
  if (o.drift) {
    c.drift = std::filesystem::is_regular_file(*o.drift)
                  ? jdsde::parse_drift_yaml(read_file(*o.drift))
                  : jdsde::parse_drift_token(*o.drift);
  }
  if (o.xi) c.xi = *o.xi;
  if (o.lambda) c.lambda = *o.lambda;
  if (o.scheme) c.scheme = *o.scheme;
  if (o.n) c.n = *o.n;
  if (o.paths) c.paths = *o.paths;
  if (o.seed) c.seed = *o.seed;
  if (!o.resolutions.empty()) {
    c.resolutions = o.resolutions;
    if (!o.n_ref) c.n_ref = 16 * c.resolutions.back();
  }
  if (o.n_ref) c.n_ref = *o.n_ref;
  if (o.safety_fraction) c.safety_fraction = *o.safety_fraction;
  if (o.metric) c.metric = *o.metric;
  if (o.bias_check) c.reference_bias_check = true;
  if (!o.probe_resolutions.empty()) c.probe.resolutions = o.probe_resolutions;
  if (o.samples) c.probe.samples = *o.samples;
  if (o.k) c.probe.k = *o.k;
  if (o.probe_n_ref) c.probe.n_ref = *o.probe_n_ref;
  if (o.probe_baseline) c.probe.baseline = *o.probe_baseline;
  if (!o.out.empty()) c.output_dir = o.out;
  jdsde::validate_config(c);
  return c;
}

int exit_code(jdsde::ErrorCategory c) {
  switch (c) {
    case jdsde::ErrorCategory::parse:
    case jdsde::ErrorCategory::configuration: return 2;
    case jdsde::ErrorCategory::domain: return 3;
    case jdsde::ErrorCategory::numeric: return 4;
    case jdsde::ErrorCategory::coupling: return 5;
    case jdsde::ErrorCategory::io: return 6;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong approximation of jump-diffusion SDEs with discontinuous drift"};
  app.require_subcommand(1);
  Overrides o;

  auto* inspect = app.add_subcommand("inspect-transform", "Tabulate G, G', mu~, sigma~, rho~ as CSV");
  add_common(inspect, o);

  auto* simulate = app.add_subcommand("simulate", "Per-path terminal values of one scheme");
  add_common(simulate, o);
  simulate->add_option("--scheme", o.scheme, "em | ja-euler | ja-qmilstein");
  simulate->add_option("--n", o.n, "Equidistant grid size");
  simulate->add_option("--paths", o.paths, "Number of paths");
  simulate->add_option("--n-ref", o.n_ref, "Master grid resolution");
  simulate->add_flag("--dump-noise", o.dump_noise, "Write noise/path_<i>.csv (t, dW, is_jump)");

  auto* convergence = app.add_subcommand("convergence", "Strong error study and fitted rate");
  add_common(convergence, o);
  convergence->add_option("--scheme", o.scheme, "em | ja-euler | ja-qmilstein");
  convergence->add_option("--paths", o.paths, "Number of paths");
  convergence->add_option("--resolutions", o.resolutions, "Powers of two, increasing");
  convergence->add_option("--n-ref", o.n_ref, "Reference resolution");
  convergence->add_option("--metric", o.metric, "terminal | sup");
  convergence->add_flag("--bias-check", o.bias_check, "Also compare against a 2 x n_ref reference");

  auto* probe = app.add_subcommand("probe-lower-bound", "k-NN probe of the optimal L1 error");
  add_common(probe, o);
  probe->add_option("--resolutions", o.probe_resolutions, "Numbers of Brownian samples n");
  probe->add_option("--samples", o.samples, "Sample size M");
  probe->add_option("--k", o.k, "Neighbours (0 = ceil(sqrt(M)))");
  probe->add_option("--n-ref", o.probe_n_ref, "Resolution of the simulated X_1");
  probe->add_option("--baseline", o.probe_baseline, "scheme | none");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    jdsde::RunContext ctx;
    ctx.config = build_config(o);
    if (!ctx.config.output_dir.empty())
      ctx.output_dir = ctx.config.output_dir;
    else if (const char* env = std::getenv("JDSDE_OUTPUT_DIR"))
      ctx.output_dir = env;
    else
      ctx.output_dir = "jdsde-out";
    if (o.threads)
      ctx.threads = *o.threads;
    else if (const char* env = std::getenv("JDSDE_THREADS"))
      ctx.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    else
      ctx.threads = 0;
    ctx.dump_noise = o.dump_noise;
    jdsde::run(command, ctx, std::cout);
  } catch (const jdsde::Error& e) {
    std::cerr << "error[" << jdsde::to_string(e.category()) << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
