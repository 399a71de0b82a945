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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "drift.hpp"
#include "errors.hpp"
#include "noise.hpp"
#include "parallel.hpp"
#include "schemes.hpp"
#include "transform.hpp"

namespace jdsde {

enum class ErrorMetric { terminal, sup };

inline const char* to_string(ErrorMetric m) { return m == ErrorMetric::terminal ? "terminal" : "sup"; }

inline ErrorMetric parse_metric(const std::string& s) {
  if (s == "terminal") return ErrorMetric::terminal;
  if (s == "sup") return ErrorMetric::sup;
  throw ConfigurationError("unknown metric '" + s + "' (expected terminal or sup)");
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Two-pass sample mean and standard error, summed in index order.
inline MeanEstimate mean_and_std_error(std::span<const double> values) {
  MeanEstimate out;
  if (values.empty()) return out;
  double s = 0.0;
  for (double v : values) s += v;
  out.mean = s / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) /
                            static_cast<double>(values.size()));
  return out;
}

inline bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

struct StudySettings {
  Scheme scheme = Scheme::ja_quasi_milstein;
  std::vector<std::int64_t> resolutions;
  std::int64_t n_ref = 8192;
  std::size_t paths = 4000;
  std::uint64_t seed = 0;
  ErrorMetric metric = ErrorMetric::terminal;
  double safety_fraction = 0.5;
  /// Also measure every error against a reference at 2 n_ref. The master
  /// grid is then 2 n_ref, so all numbers refer to that finer noise path.
  bool reference_bias_check = false;
  unsigned threads = 1;
};

struct ConvergenceReport {
  std::vector<std::int64_t> resolutions;
  std::vector<double> errors;
  std::vector<double> std_errors;
  /// Filled when the reference-bias check ran: errors against the 2 n_ref
  /// reference and the paired shift relative to `errors`.
  std::vector<double> errors_fine_reference;
  std::vector<double> bias_shift;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci_low = 0.0;
  double slope_ci_high = 0.0;
  StudySettings settings;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// OLS of log2(error) on log2(n), error ~ 2^intercept * n^slope, with a 95%
/// t-interval for the slope from the residuals.
inline RateFit fit_rate(std::span<const std::int64_t> resolutions, std::span<const double> errors,
                        std::span<const double> std_errors = {}) {
  const std::size_t m = resolutions.size();
  if (m < 3) throw DomainError("fit_rate needs at least 3 resolutions");
  if (errors.size() != m || (!std_errors.empty() && std_errors.size() != m))
    throw DomainError("fit_rate inputs differ in length");
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (resolutions[i] < 1) throw DomainError("resolutions must be positive");
    if (!(errors[i] > 0.0))
      throw DomainError("nonpositive error at n = " + std::to_string(resolutions[i]) +
                        " (too few paths, or below the reference bias floor)");
    lx[i] = std::log2(static_cast<double>(resolutions[i]));
    ly[i] = std::log2(errors[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_rate needs distinct resolutions");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += r * r;
  }
  const double dof = static_cast<double>(m - 2);
  const double se = std::sqrt(rss / dof / sxx);
  boost::math::students_t dist(dof);
  const double q = boost::math::quantile(dist, 0.975);
  fit.ci_low = fit.slope - q * se;
  fit.ci_high = fit.slope + q * se;
  return fit;
}

inline void validate_study(const StudySettings& s) {
  if (s.resolutions.empty()) throw ConfigurationError("no resolutions given");
  if (s.paths < 2) throw ConfigurationError("need at least 2 paths");
  if (s.n_ref < 1) throw ConfigurationError("n_ref must be positive");
  for (std::size_t i = 0; i < s.resolutions.size(); ++i) {
    const auto n = s.resolutions[i];
    if (n < 1) throw ConfigurationError("resolutions must be positive");
    if (i > 0 && n <= s.resolutions[i - 1])
      throw ConfigurationError("resolutions must be strictly increasing");
    if (s.n_ref % n != 0)
      throw ConfigurationError("resolution " + std::to_string(n) + " does not divide n_ref " +
                               std::to_string(s.n_ref));
  }
}

/// Monte Carlo strong errors of `settings.scheme` at every resolution against
/// the coupled transformation-based jump-adapted quasi-Milstein reference at
/// n_ref. Path p uses PathSeed{seed, p}; all resolutions of a path share one
/// master-grid noise path.
inline ConvergenceReport run_convergence(const JumpDiffusionProblem& problem,
                                         const StudySettings& settings) {
  validate_study(settings);
  const auto tc = TransformedCoefficients::build(problem.drift, settings.safety_fraction);
  const std::size_t nres = settings.resolutions.size();
  const std::int64_t n_master = settings.reference_bias_check ? 2 * settings.n_ref : settings.n_ref;
  const std::size_t cols = settings.reference_bias_check ? 2 * nres : nres;
  std::vector<double> per_path(settings.paths * cols);

  parallel_for(settings.paths, settings.threads, [&](std::size_t p) {
    const auto noise =
        sample_driving_noise(problem.jump_intensity, n_master, {settings.seed, p});
    const auto reference = back_transform(
        jump_adapted_quasi_milstein(tc, problem.initial_value, noise, settings.n_ref),
        tc.transform());
    std::optional<SchemeTrajectory> fine;
    if (settings.reference_bias_check)
      fine = back_transform(
          jump_adapted_quasi_milstein(tc, problem.initial_value, noise, n_master),
          tc.transform());
    double* row = per_path.data() + p * cols;
    for (std::size_t r = 0; r < nres; ++r) {
      const auto n = settings.resolutions[r];
      const auto approx = (settings.scheme == Scheme::ja_quasi_milstein && n == settings.n_ref)
                              ? reference
                              : approximate(settings.scheme, problem, tc, noise, n);
      auto distance = [&](const SchemeTrajectory& ref) {
        return settings.metric == ErrorMetric::terminal
                   ? std::abs(terminal_value(approx) - terminal_value(ref))
                   : discrete_sup_distance(approx, ref);
      };
      row[r] = distance(reference);
      if (fine) row[nres + r] = distance(*fine);
    }
  });

  ConvergenceReport report;
  report.settings = settings;
  report.resolutions = settings.resolutions;
  std::vector<double> column(settings.paths), diff(settings.paths);
  for (std::size_t r = 0; r < nres; ++r) {
    for (std::size_t p = 0; p < settings.paths; ++p) column[p] = per_path[p * cols + r];
    const auto est = mean_and_std_error(column);
    report.errors.push_back(est.mean);
    report.std_errors.push_back(est.std_error);
    if (settings.reference_bias_check) {
      for (std::size_t p = 0; p < settings.paths; ++p)
        diff[p] = per_path[p * cols + nres + r];
      const auto fine_est = mean_and_std_error(diff);
      report.errors_fine_reference.push_back(fine_est.mean);
      report.bias_shift.push_back(fine_est.mean - est.mean);
    }
  }
  bool fittable = nres >= 3;
  for (double e : report.errors) fittable = fittable && e > 0.0;
  if (fittable) {
    const auto fit = fit_rate(report.resolutions, report.errors, report.std_errors);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.slope_ci_low = fit.ci_low;
    report.slope_ci_high = fit.ci_high;
  }
  return report;
}

/// Single-resolution strong error (mean and standard error over paths).
inline MeanEstimate estimate_strong_error(const JumpDiffusionProblem& problem, Scheme scheme,
                                          std::int64_t n, std::int64_t n_ref, std::size_t paths,
                                          std::uint64_t seed,
                                          ErrorMetric metric = ErrorMetric::terminal,
                                          double safety_fraction = 0.5, unsigned threads = 1) {
  if (n < 1 || n_ref % n != 0)
    throw ConfigurationError("resolution " + std::to_string(n) + " does not divide n_ref " +
                             std::to_string(n_ref));
  StudySettings s;
  s.scheme = scheme;
  s.resolutions = {n};
  s.n_ref = n_ref;
  s.paths = paths;
  s.seed = seed;
  s.metric = metric;
  s.safety_fraction = safety_fraction;
  s.threads = threads;
  const auto report = run_convergence(problem, s);
  return {report.errors.front(), report.std_errors.front()};
}

}  // namespace jdsde
