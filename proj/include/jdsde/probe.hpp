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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drift.hpp"
#include "errors.hpp"
#include "noise.hpp"
#include "parallel.hpp"
#include "schemes.hpp"
#include "study.hpp"
#include "transform.hpp"

namespace jdsde {

/// Smallest w with P(Poisson(lambda) <= w) >= level.
inline std::size_t poisson_quantile(double lambda, double level) {
  double p = std::exp(-lambda), cdf = p;
  std::size_t k = 0;
  while (cdf < level) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

/// Row-major feature matrix with per-row targets.
struct FeatureTable {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<double> targets;

  std::size_t rows() const noexcept { return targets.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }
};

/// Rescales every column to unit sample standard deviation (columns with
/// zero spread are left unscaled).
inline void standardize(FeatureTable& table) {
  const std::size_t m = table.rows();
  if (m < 2) return;
  for (std::size_t d = 0; d < table.dim; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += table.features[i * table.dim + d];
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = table.features[i * table.dim + d] - mean;
      ss += v * v;
    }
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      double& v = table.features[i * table.dim + d];
      v = (v - mean) * scale;
    }
  }
}

/// Leave-one-out k-nearest-neighbour regression: for every row, the mean
/// target of its k nearest other rows in Euclidean distance (ties broken by
/// row index). Returns |target - prediction| per row.
inline std::vector<double> knn_loo_residuals(const FeatureTable& table, std::size_t k,
                                             unsigned threads = 1) {
  const std::size_t m = table.rows();
  if (k == 0 || m <= k) throw ConfigurationError("k-NN needs 0 < k < sample size");
  std::vector<double> residuals(m);
  constexpr std::size_t kBlock = 128;
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    std::vector<std::pair<double, std::size_t>> dist(m - 1);
    const std::size_t end = std::min(m, (b + 1) * kBlock);
    for (std::size_t q = b * kBlock; q < end; ++q) {
      const double* xq = table.features.data() + q * table.dim;
      std::size_t slot = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == q) continue;
        const double* xj = table.features.data() + j * table.dim;
        double s = 0.0;
        for (std::size_t d = 0; d < table.dim; ++d) {
          const double diff = xq[d] - xj[d];
          s += diff * diff;
        }
        dist[slot++] = {s, j};
      }
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
      std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                [](const auto& a, const auto& c) { return a.second < c.second; });
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum += table.targets[dist[i].second];
      residuals[q] = std::abs(table.targets[q] - sum / static_cast<double>(k));
    }
  });
  return residuals;
}

/// Feature-measurable predictor subtracted from X_1 before the k-NN step.
/// `scheme` is the jump-adapted quasi-Milstein value at resolution n, which
/// reads W only at the nodes i/n and the jump times, i.e. exactly the probe's
/// information. The k-NN step then only has to learn the scheme's
/// conditional bias, which keeps the estimate usable in 10-30 dimensions.
enum class ProbeBaseline { none, scheme };

inline const char* to_string(ProbeBaseline b) { return b == ProbeBaseline::none ? "none" : "scheme"; }

inline ProbeBaseline parse_probe_baseline(const std::string& s) {
  if (s == "none") return ProbeBaseline::none;
  if (s == "scheme") return ProbeBaseline::scheme;
  throw ConfigurationError("unknown probe baseline '" + s + "' (expected none or scheme)");
}

struct ProbeSettings {
  std::vector<std::int64_t> resolutions{1, 2, 4, 8, 16};
  std::size_t samples = 20000;
  /// 0 selects ceil(sqrt(samples)).
  std::size_t k = 0;
  std::int64_t n_ref = 4096;
  std::uint64_t seed = 0;
  double safety_fraction = 0.5;
  /// Coverage level for the zero-padded jump feature width.
  double padding_level = 0.999;
  ProbeBaseline baseline = ProbeBaseline::scheme;
  unsigned threads = 1;
};

struct ProbeReport {
  std::vector<std::int64_t> resolutions;
  std::vector<double> residuals;
  std::vector<double> std_errors;
  std::size_t samples_used = 0;     ///< M after dropping overflow paths
  std::size_t samples_dropped = 0;  ///< paths with more jumps than the padding width
  std::size_t k = 0;
  std::size_t jump_width = 0;
  double slope = 0.0;
};

/// Empirical probe of the best reconstruction of X_1 from W at i/n (i=1..n),
/// W at the jump times and the jump times themselves (with the jump count).
/// X_1 comes from the quasi-Milstein reference at n_ref; the reconstruction is
/// leave-one-out k-NN on standardized features. The same M paths serve every
/// n. The residual is an upper estimate of the optimal error with equidistant
/// nodes.
inline ProbeReport probe_lower_bound(const JumpDiffusionProblem& problem,
                                     const ProbeSettings& settings) {
  if (settings.resolutions.empty()) throw ConfigurationError("probe needs resolutions");
  std::int64_t common = 1;
  for (auto n : settings.resolutions) {
    if (n < 1) throw ConfigurationError("probe resolutions must be positive");
    common = std::lcm(common, n);
  }
  if (settings.n_ref % common != 0)
    throw ConfigurationError("probe n_ref must be a multiple of every probe resolution");
  const std::size_t k =
      settings.k ? settings.k
                 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(settings.samples))));
  if (settings.samples <= k) throw ConfigurationError("probe sample size must exceed k");

  const auto tc = TransformedCoefficients::build(problem.drift, settings.safety_fraction);
  const std::size_t width = poisson_quantile(problem.jump_intensity, settings.padding_level);
  const std::size_t m = settings.samples;
  const std::size_t wcols = static_cast<std::size_t>(common);

  // Per path: X_1, W at j/common (j = 1..common), N_1, jump times, W at jumps.
  std::vector<double> x1(m), w_grid(m * wcols), nu(m * width), w_nu(m * width);
  std::vector<std::size_t> counts(m);
  const std::size_t nres = settings.resolutions.size();
  std::vector<double> baseline(m * nres, 0.0);
  parallel_for(m, settings.threads, [&](std::size_t p) {
    const auto noise =
        sample_driving_noise(problem.jump_intensity, settings.n_ref, {settings.seed, p});
    x1[p] = tc.transform().inverse(terminal_value(
        jump_adapted_quasi_milstein(tc, problem.initial_value, noise, settings.n_ref)));
    counts[p] = noise.jump_count();
    const auto& nodes = noise.master_grid().nodes;
    const auto w = noise.brownian_path();
    std::size_t col = 0;
    for (std::size_t i = 1; i < nodes.size() && col < wcols; ++i)
      if (nodes[i] == static_cast<double>(col + 1) / static_cast<double>(common))
        w_grid[p * wcols + col++] = w[i];
    const auto jumps = noise.jump_times();
    for (std::size_t j = 0; j < std::min(width, jumps.size()); ++j) nu[p * width + j] = jumps[j];
    const auto wj = brownian_at_jump_times(noise, width);
    std::copy(wj.begin(), wj.end(), w_nu.begin() + static_cast<std::ptrdiff_t>(p * width));
    if (settings.baseline == ProbeBaseline::scheme)
      for (std::size_t r = 0; r < nres; ++r)
        baseline[p * nres + r] = tc.transform().inverse(terminal_value(jump_adapted_quasi_milstein(
            tc, problem.initial_value, noise, settings.resolutions[r])));
  });

  std::vector<std::size_t> kept;
  for (std::size_t p = 0; p < m; ++p)
    if (counts[p] <= width) kept.push_back(p);

  ProbeReport report;
  report.resolutions = settings.resolutions;
  report.samples_used = kept.size();
  report.samples_dropped = m - kept.size();
  report.k = k;
  report.jump_width = width;
  if (kept.size() <= k) throw ConfigurationError("too few paths left after dropping overflow");

  for (std::size_t r = 0; r < nres; ++r) {
    const auto n = settings.resolutions[r];
    FeatureTable table;
    table.dim = static_cast<std::size_t>(n) + 1 + 2 * width;
    table.features.reserve(kept.size() * table.dim);
    const std::size_t stride = wcols / static_cast<std::size_t>(n);
    for (auto p : kept) {
      for (std::size_t i = 1; i <= static_cast<std::size_t>(n); ++i)
        table.features.push_back(w_grid[p * wcols + i * stride - 1]);
      table.features.push_back(static_cast<double>(counts[p]));
      for (std::size_t j = 0; j < width; ++j) table.features.push_back(nu[p * width + j]);
      for (std::size_t j = 0; j < width; ++j) table.features.push_back(w_nu[p * width + j]);
      table.targets.push_back(x1[p] - baseline[p * nres + r]);
    }
    standardize(table);
    // |X_1 - (b + knn(X_1 - b))| = |(X_1 - b) - knn(X_1 - b)|
    const auto res = knn_loo_residuals(table, k, settings.threads);
    const auto est = mean_and_std_error(res);
    report.residuals.push_back(est.mean);
    report.std_errors.push_back(est.std_error);
  }
  bool fittable = report.resolutions.size() >= 3;
  for (double r : report.residuals) fittable = fittable && r > 0.0;
  if (fittable) report.slope = fit_rate(report.resolutions, report.residuals).slope;
  return report;
}

}  // namespace jdsde
