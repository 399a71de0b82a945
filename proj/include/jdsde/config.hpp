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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "drift.hpp"
#include "errors.hpp"
#include "probe.hpp"
#include "schemes.hpp"
#include "study.hpp"

namespace jdsde {

/// Catalog drift plus its parameters. Kinds:
///   neg-sign          mu = -amplitude * sign(x)
///   zero              mu = 0
///   linear            mu = slope * x + offset
///   piecewise-linear  piece i is slopes[i] * x + intercepts[i] between breakpoints
struct DriftSpec {
  std::string kind = "neg-sign";
  double amplitude = 1.0;
  double slope = 0.0;
  double offset = 0.0;
  std::vector<double> breakpoints;
  std::vector<double> slopes;
  std::vector<double> intercepts;

  bool operator==(const DriftSpec&) const = default;
};

inline PiecewiseDrift make_drift(const DriftSpec& spec) {
  if (spec.kind == "neg-sign") return neg_sign_drift(spec.amplitude);
  if (spec.kind == "zero") return zero_drift();
  if (spec.kind == "linear") return linear_drift(spec.slope, spec.offset);
  if (spec.kind == "piecewise-linear")
    return piecewise_linear_drift(spec.breakpoints, spec.slopes, spec.intercepts);
  throw ConfigurationError("unknown drift kind '" + spec.kind +
                           "' (expected neg-sign, zero, linear, piecewise-linear)");
}

struct ProbeConfig {
  std::vector<std::int64_t> resolutions{1, 2, 4, 8, 16};
  std::size_t samples = 20000;
  std::size_t k = 0;
  std::int64_t n_ref = 4096;
  std::string baseline = "scheme";

  bool operator==(const ProbeConfig&) const = default;
};

struct ExperimentConfig {
  DriftSpec drift;
  double xi = 0.0;
  double lambda = 1.0;
  std::string scheme = "ja-qmilstein";
  std::int64_t n = 64;
  std::vector<std::int64_t> resolutions{8, 16, 32, 64, 128, 256, 512};
  std::int64_t n_ref = 8192;
  std::size_t paths = 4000;
  std::uint64_t seed = 0;
  double safety_fraction = 0.5;
  std::string metric = "terminal";
  bool reference_bias_check = false;
  std::string output_dir;
  ProbeConfig probe;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Checks every cross-field constraint; throws ConfigurationError.
inline void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigurationError(m); };
  if (!std::isfinite(c.xi)) fail("xi must be finite");
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda))
    fail("lambda must be positive (jump intensity in (0, inf))");
  if (!(c.safety_fraction > 0.0 && c.safety_fraction < 1.0))
    fail("safety_fraction must lie in (0, 1)");
  if (!is_power_of_two(c.n_ref)) fail("n_ref must be a power of two");
  if (c.resolutions.empty()) fail("resolutions must not be empty");
  for (std::size_t i = 0; i < c.resolutions.size(); ++i) {
    const auto n = c.resolutions[i];
    if (!is_power_of_two(n)) fail("resolution " + std::to_string(n) + " is not a power of two");
    if (i > 0 && n <= c.resolutions[i - 1]) fail("resolutions must be strictly increasing");
    if (c.n_ref % n != 0) fail("resolution " + std::to_string(n) + " does not divide n_ref");
  }
  if (c.n < 1 || c.n_ref % c.n != 0) fail("n must be a positive divisor of n_ref");
  if (c.paths < 2) fail("paths must be at least 2");
  parse_scheme(c.scheme);
  parse_metric(c.metric);
  parse_probe_baseline(c.probe.baseline);
  if (!is_power_of_two(c.probe.n_ref)) fail("probe n_ref must be a power of two");
  if (c.probe.resolutions.empty()) fail("probe resolutions must not be empty");
  for (auto n : c.probe.resolutions)
    if (!is_power_of_two(n) || c.probe.n_ref % n != 0)
      fail("probe resolution " + std::to_string(n) + " must be a power of two dividing probe n_ref");
  if (c.probe.samples < 1000) fail("probe samples must be at least 1000");
  if (c.probe.k >= c.probe.samples) fail("probe k must be below probe samples");
  make_drift(c.drift);
}

namespace detail {

inline int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

template <class T>
T read_scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar())
    throw ParseError("'" + key + "' must be a scalar", line_of(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError("'" + key + "' has an invalid value '" + node.Scalar() + "'", line_of(node));
  }
}

template <class T>
std::vector<T> read_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ParseError("'" + key + "' must be a list", line_of(node));
  std::vector<T> out;
  for (const auto& item : node) out.push_back(read_scalar<T>(item, key));
  return out;
}

inline void reject_unknown(const YAML::Node& map, const std::set<std::string>& known,
                           const std::string& where) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key))
      throw ParseError("unknown key '" + key + "'" + where, line_of(kv.first));
  }
}

inline DriftSpec parse_drift_node(const YAML::Node& node) {
  DriftSpec d;
  if (node.IsScalar()) {
    d.kind = node.Scalar();
  } else if (node.IsMap()) {
    reject_unknown(node,
                   {"kind", "amplitude", "slope", "offset", "breakpoints", "slopes", "intercepts"},
                   " in drift");
    if (!node["kind"]) throw ParseError("drift needs a 'kind'", line_of(node));
    d.kind = read_scalar<std::string>(node["kind"], "kind");
    if (node["amplitude"]) d.amplitude = read_scalar<double>(node["amplitude"], "amplitude");
    if (node["slope"]) d.slope = read_scalar<double>(node["slope"], "slope");
    if (node["offset"]) d.offset = read_scalar<double>(node["offset"], "offset");
    if (node["breakpoints"]) d.breakpoints = read_list<double>(node["breakpoints"], "breakpoints");
    if (node["slopes"]) d.slopes = read_list<double>(node["slopes"], "slopes");
    if (node["intercepts"]) d.intercepts = read_list<double>(node["intercepts"], "intercepts");
  } else {
    throw ParseError("drift must be a catalog name or a mapping", line_of(node));
  }
  try {
    make_drift(d);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid drift: ") + e.what(), line_of(node));
  }
  return d;
}

}  // namespace detail

/// Parses a drift given either as YAML text of a drift node or as a short
/// catalog token: "neg-sign", "neg-sign:<amplitude>", "zero",
/// "linear:<slope>[:<offset>]".
inline DriftSpec parse_drift_token(const std::string& token) {
  std::vector<std::string> parts;
  std::stringstream ss(token);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad number in drift token '" + token + "'", 0);
    }
  };
  DriftSpec d;
  if (parts.empty()) throw ParseError("empty drift token", 0);
  d.kind = parts[0];
  if (d.kind == "neg-sign" && parts.size() <= 2) {
    if (parts.size() == 2) d.amplitude = num(1);
  } else if (d.kind == "zero" && parts.size() == 1) {
  } else if (d.kind == "linear" && parts.size() >= 2 && parts.size() <= 3) {
    d.slope = num(1);
    if (parts.size() == 3) d.offset = num(2);
  } else {
    throw ParseError("unknown drift token '" + token + "'", 0);
  }
  return d;
}

inline DriftSpec parse_drift_yaml(const std::string& text) {
  try {
    return detail::parse_drift_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
}

/// Parses the YAML experiment config. Absent keys keep their defaults; when
/// resolutions are given without n_ref, n_ref becomes 16 x max resolution.
inline ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
  ExperimentConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) throw ParseError("config must be a mapping", detail::line_of(root));
  using detail::read_list;
  using detail::read_scalar;
  detail::reject_unknown(root,
                         {"drift", "xi", "lambda", "scheme", "n", "resolutions", "n_ref", "paths",
                          "seed", "safety_fraction", "metric", "reference_bias_check",
                          "output_dir", "probe"},
                         "");
  if (root["drift"]) c.drift = detail::parse_drift_node(root["drift"]);
  if (root["xi"]) c.xi = read_scalar<double>(root["xi"], "xi");
  if (root["lambda"]) c.lambda = read_scalar<double>(root["lambda"], "lambda");
  if (root["scheme"]) c.scheme = read_scalar<std::string>(root["scheme"], "scheme");
  if (root["n"]) c.n = read_scalar<std::int64_t>(root["n"], "n");
  if (root["resolutions"]) {
    c.resolutions = read_list<std::int64_t>(root["resolutions"], "resolutions");
    if (!c.resolutions.empty() && !root["n_ref"])
      c.n_ref = 16 * *std::max_element(c.resolutions.begin(), c.resolutions.end());
  }
  if (root["n_ref"]) c.n_ref = read_scalar<std::int64_t>(root["n_ref"], "n_ref");
  if (root["paths"]) c.paths = read_scalar<std::size_t>(root["paths"], "paths");
  if (root["seed"]) c.seed = read_scalar<std::uint64_t>(root["seed"], "seed");
  if (root["safety_fraction"])
    c.safety_fraction = read_scalar<double>(root["safety_fraction"], "safety_fraction");
  if (root["metric"]) c.metric = read_scalar<std::string>(root["metric"], "metric");
  if (root["reference_bias_check"])
    c.reference_bias_check = read_scalar<bool>(root["reference_bias_check"], "reference_bias_check");
  if (root["output_dir"]) c.output_dir = read_scalar<std::string>(root["output_dir"], "output_dir");
  if (const auto p = root["probe"]) {
    if (!p.IsMap()) throw ParseError("'probe' must be a mapping", detail::line_of(p));
    detail::reject_unknown(p, {"resolutions", "samples", "k", "n_ref", "baseline"}, " in probe");
    if (p["resolutions"]) c.probe.resolutions = read_list<std::int64_t>(p["resolutions"], "resolutions");
    if (p["samples"]) c.probe.samples = read_scalar<std::size_t>(p["samples"], "samples");
    if (p["k"]) c.probe.k = read_scalar<std::size_t>(p["k"], "k");
    if (p["n_ref"]) c.probe.n_ref = read_scalar<std::int64_t>(p["n_ref"], "n_ref");
    if (p["baseline"]) c.probe.baseline = read_scalar<std::string>(p["baseline"], "baseline");
  }
  try {
    validate_config(c);
  } catch (const ConfigurationError& e) {
    throw ParseError(e.what(), 0);
  }
  return c;
}

/// YAML text that parse_config maps back to an equal config.
inline std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "drift" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << c.drift.kind;
  out << YAML::Key << "amplitude" << YAML::Value << c.drift.amplitude;
  out << YAML::Key << "slope" << YAML::Value << c.drift.slope;
  out << YAML::Key << "offset" << YAML::Value << c.drift.offset;
  out << YAML::Key << "breakpoints" << YAML::Value << YAML::Flow << c.drift.breakpoints;
  out << YAML::Key << "slopes" << YAML::Value << YAML::Flow << c.drift.slopes;
  out << YAML::Key << "intercepts" << YAML::Value << YAML::Flow << c.drift.intercepts;
  out << YAML::EndMap;
  out << YAML::Key << "xi" << YAML::Value << c.xi;
  out << YAML::Key << "lambda" << YAML::Value << c.lambda;
  out << YAML::Key << "scheme" << YAML::Value << c.scheme;
  out << YAML::Key << "n" << YAML::Value << c.n;
  out << YAML::Key << "resolutions" << YAML::Value << YAML::Flow << c.resolutions;
  out << YAML::Key << "n_ref" << YAML::Value << c.n_ref;
  out << YAML::Key << "paths" << YAML::Value << c.paths;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "safety_fraction" << YAML::Value << c.safety_fraction;
  out << YAML::Key << "metric" << YAML::Value << c.metric;
  out << YAML::Key << "reference_bias_check" << YAML::Value << c.reference_bias_check;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  out << YAML::Key << "probe" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "resolutions" << YAML::Value << YAML::Flow << c.probe.resolutions;
  out << YAML::Key << "samples" << YAML::Value << c.probe.samples;
  out << YAML::Key << "k" << YAML::Value << c.probe.k;
  out << YAML::Key << "n_ref" << YAML::Value << c.probe.n_ref;
  out << YAML::Key << "baseline" << YAML::Value << c.probe.baseline;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

/// FNV-1a over the serialized config, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace jdsde
