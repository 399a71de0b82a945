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
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace jdsde {

/// Value and derivative of the drift on one open interval between breakpoints.
/// Evaluators are expected to extend continuously to the closure of the
/// interval; the derivative at a breakpoint is taken from the piece on the right.
struct DriftPiece {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Piecewise Lipschitz drift with Lipschitz derivative on each piece.
///
/// Breakpoints are strictly increasing; piece i lives on (b[i-1], b[i]) with
/// b[-1] = -inf and b[k] = +inf. The one-sided limits at each breakpoint are
/// supplied explicitly so nothing downstream has to take numerical limits.
/// Exactly at a breakpoint the drift evaluates to its right limit.
class PiecewiseDrift {
 public:
  PiecewiseDrift(std::vector<double> breakpoints, std::vector<DriftPiece> pieces,
                 std::vector<double> left_limits, std::vector<double> right_limits,
                 std::optional<double> lipschitz_bound_hint = std::nullopt)
      : breakpoints_(std::move(breakpoints)),
        pieces_(std::move(pieces)),
        left_limits_(std::move(left_limits)),
        right_limits_(std::move(right_limits)),
        lipschitz_bound_hint_(lipschitz_bound_hint) {
    validate();
  }

  /// Drift without breakpoints.
  static PiecewiseDrift smooth(DriftPiece piece,
                               std::optional<double> lipschitz_bound_hint = std::nullopt) {
    std::vector<DriftPiece> pieces;
    pieces.push_back(std::move(piece));
    return PiecewiseDrift({}, std::move(pieces), {}, {}, lipschitz_bound_hint);
  }

  std::size_t breakpoint_count() const noexcept { return breakpoints_.size(); }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> left_limits() const noexcept { return left_limits_; }
  std::span<const double> right_limits() const noexcept { return right_limits_; }
  std::optional<double> lipschitz_bound_hint() const noexcept { return lipschitz_bound_hint_; }
  const DriftPiece& piece(std::size_t i) const { return pieces_.at(i); }
  std::size_t piece_count() const noexcept { return pieces_.size(); }

  /// Index of the piece whose half-open interval [b[i-1], b[i]) contains x.
  std::size_t piece_index(double x) const noexcept {
    return static_cast<std::size_t>(
        std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
  }

  /// Index j with b[j] == x, if x is a breakpoint.
  std::optional<std::size_t> breakpoint_at(double x) const noexcept {
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
    if (it != breakpoints_.end() && *it == x)
      return static_cast<std::size_t>(it - breakpoints_.begin());
    return std::nullopt;
  }

  double operator()(double x) const { return value(x); }

  double value(double x) const {
    require_finite(x);
    if (auto j = breakpoint_at(x)) return right_limits_[*j];
    return pieces_[piece_index(x)].value(x);
  }

  double derivative(double x) const {
    require_finite(x);
    return pieces_[piece_index(x)].derivative(x);
  }

 private:
  static void require_finite(double x) {
    if (!std::isfinite(x)) throw DomainError("drift evaluated at a non-finite state");
  }

  void validate() const {
    const std::size_t k = breakpoints_.size();
    if (pieces_.size() != k + 1)
      throw DomainError("drift needs " + std::to_string(k + 1) + " pieces for " +
                        std::to_string(k) + " breakpoints, got " +
                        std::to_string(pieces_.size()));
    if (left_limits_.size() != k || right_limits_.size() != k)
      throw DomainError("drift needs one left and one right limit per breakpoint");
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(breakpoints_[j])) throw DomainError("breakpoints must be finite");
      if (j > 0 && !(breakpoints_[j - 1] < breakpoints_[j]))
        throw DomainError("breakpoints must be strictly increasing");
      if (!std::isfinite(left_limits_[j]) || !std::isfinite(right_limits_[j]))
        throw DomainError("one-sided limits must be finite");
    }
    for (const auto& p : pieces_)
      if (!p.value || !p.derivative) throw DomainError("drift piece without evaluator");
    if (lipschitz_bound_hint_ && !(*lipschitz_bound_hint_ > 0.0))
      throw DomainError("lipschitz_bound_hint must be positive");
  }

  std::vector<double> breakpoints_;
  std::vector<DriftPiece> pieces_;
  std::vector<double> left_limits_;
  std::vector<double> right_limits_;
  std::optional<double> lipschitz_bound_hint_;
};

/// True iff some breakpoint carries unequal supplied one-sided limits.
inline bool has_genuine_discontinuity(const PiecewiseDrift& drift) {
  for (std::size_t j = 0; j < drift.breakpoint_count(); ++j)
    if (drift.left_limits()[j] != drift.right_limits()[j]) return true;
  return false;
}

inline double eval_drift(const PiecewiseDrift& drift, double x) { return drift.value(x); }
inline double eval_drift_derivative(const PiecewiseDrift& drift, double x) {
  return drift.derivative(x);
}

// ---------------------------------------------------------------------------
// Sampled regularity checks. Lipschitz membership cannot be decided from
// opaque evaluators, so these only report what random sampling sees.

struct RegularityReport {
  /// Largest sampled |mu(x)-mu(y)|/|x-y| over all pieces.
  double value_quotient = 0.0;
  /// Largest sampled |mu'(x)-mu'(y)|/|x-y| over all pieces.
  double derivative_quotient = 0.0;
  /// Per step h, the largest |mu(b_j -/+ h) - supplied limit| over j and sides.
  std::vector<std::pair<double, double>> limit_gaps;

  /// Quotients carry rounding from the subtraction, hence the relative slack.
  bool within_hint(const PiecewiseDrift& drift, double slack = 1e-9) const {
    auto hint = drift.lipschitz_bound_hint();
    const double bound = hint ? *hint * (1.0 + slack) : 0.0;
    return !hint || (value_quotient <= bound && derivative_quotient <= bound);
  }
};

/// Samples `pairs` random point pairs per piece (unbounded pieces are cut at
/// `window` beyond the outermost breakpoint) and probes the supplied limits
/// with steps 1e-3, 1e-5, 1e-7.
inline RegularityReport check_sampled_regularity(const PiecewiseDrift& drift,
                                                 std::size_t pairs = 2000,
                                                 double window = 5.0,
                                                 std::uint64_t seed = 7) {
  RegularityReport report;
  std::mt19937_64 gen(seed);
  const auto bps = drift.breakpoints();
  const double lo_all = bps.empty() ? -window : bps.front() - window;
  const double hi_all = bps.empty() ? window : bps.back() + window;
  for (std::size_t i = 0; i < drift.piece_count(); ++i) {
    const double lo = i == 0 ? lo_all : bps[i - 1];
    const double hi = i == bps.size() ? hi_all : bps[i];
    std::uniform_real_distribution<double> pick(lo, hi);
    const auto& piece = drift.piece(i);
    for (std::size_t s = 0; s < pairs; ++s) {
      double x = pick(gen), y = pick(gen);
      if (x == y || x == lo || y == lo) continue;
      const double dx = std::abs(x - y);
      report.value_quotient =
          std::max(report.value_quotient, std::abs(piece.value(x) - piece.value(y)) / dx);
      report.derivative_quotient = std::max(
          report.derivative_quotient, std::abs(piece.derivative(x) - piece.derivative(y)) / dx);
    }
  }
  for (double h : {1e-3, 1e-5, 1e-7}) {
    double gap = 0.0;
    for (std::size_t j = 0; j < bps.size(); ++j) {
      gap = std::max(gap, std::abs(drift.value(bps[j] - h) - drift.left_limits()[j]));
      gap = std::max(gap, std::abs(drift.value(bps[j] + h) - drift.right_limits()[j]));
    }
    report.limit_gaps.emplace_back(h, gap);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Catalog.

/// mu(x) = -amplitude * sign(x), with mu(0) = -amplitude by the right-limit rule.
inline PiecewiseDrift neg_sign_drift(double amplitude = 1.0) {
  if (!std::isfinite(amplitude)) throw DomainError("amplitude must be finite");
  std::vector<DriftPiece> pieces{
      {[amplitude](double) { return amplitude; }, [](double) { return 0.0; }},
      {[amplitude](double) { return -amplitude; }, [](double) { return 0.0; }}};
  return PiecewiseDrift({0.0}, std::move(pieces), {amplitude}, {-amplitude});
}

/// mu(x) = slope * x + offset.
inline PiecewiseDrift linear_drift(double slope, double offset = 0.0) {
  return PiecewiseDrift::smooth(
      {[slope, offset](double x) { return slope * x + offset; }, [slope](double) { return slope; }},
      std::abs(slope) > 0.0 ? std::optional<double>(std::abs(slope)) : std::nullopt);
}

inline PiecewiseDrift zero_drift() { return linear_drift(0.0, 0.0); }

/// Piece i is slopes[i] * x + intercepts[i]; limits follow from the table.
inline PiecewiseDrift piecewise_linear_drift(std::vector<double> breakpoints,
                                             const std::vector<double>& slopes,
                                             const std::vector<double>& intercepts) {
  const std::size_t k = breakpoints.size();
  if (slopes.size() != k + 1 || intercepts.size() != k + 1)
    throw DomainError("piecewise-linear drift needs k+1 slopes and intercepts");
  std::vector<DriftPiece> pieces;
  double max_slope = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double a = slopes[i], b = intercepts[i];
    if (!std::isfinite(a) || !std::isfinite(b))
      throw DomainError("piecewise-linear coefficients must be finite");
    pieces.push_back({[a, b](double x) { return a * x + b; }, [a](double) { return a; }});
    max_slope = std::max(max_slope, std::abs(a));
  }
  std::vector<double> left(k), right(k);
  for (std::size_t j = 0; j < k; ++j) {
    left[j] = slopes[j] * breakpoints[j] + intercepts[j];
    right[j] = slopes[j + 1] * breakpoints[j] + intercepts[j + 1];
  }
  return PiecewiseDrift(std::move(breakpoints), std::move(pieces), std::move(left),
                        std::move(right),
                        max_slope > 0.0 ? std::optional<double>(max_slope) : std::nullopt);
}

/// dX = mu(X) dt + dW + dN on [0, 1], X_0 = initial_value, N Poisson with
/// intensity jump_intensity. The jump-free companion is the same problem run
/// on a noise path without jumps.
struct JumpDiffusionProblem {
  PiecewiseDrift drift;
  double initial_value = 0.0;
  double jump_intensity = 1.0;
  static constexpr double horizon = 1.0;

  JumpDiffusionProblem(PiecewiseDrift d, double xi, double lambda)
      : drift(std::move(d)), initial_value(xi), jump_intensity(lambda) {
    if (!std::isfinite(xi)) throw DomainError("initial value must be finite");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw DomainError("jump intensity must be positive and finite");
  }
};

}  // namespace jdsde
