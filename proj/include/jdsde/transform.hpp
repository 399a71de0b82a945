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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drift.hpp"
#include "errors.hpp"

namespace jdsde {

/// Compactly supported bump (1+u)^3 (1-u)^3 = (1-u^2)^3 on [-1, 1], zero outside.
struct Bump {
  static double phi(double u) noexcept {
    if (std::abs(u) > 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return w * w * w;
  }
  static double phi_prime(double u) noexcept {
    if (std::abs(u) > 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return -6.0 * u * w * w;
  }
  static double phi_second(double u) noexcept {
    if (std::abs(u) > 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return -6.0 * w * w + 24.0 * u * u * w;
  }
};

inline double phi(double u) noexcept { return Bump::phi(u); }

enum class Side { left, right };

/// The regularizing bijection
///
///   G(x) = x + sum_j alpha_j phi((x - b_j) / c) (x - b_j) |x - b_j|
///
/// with alpha_j = (mu(b_j-) - mu(b_j+)) / 2. Since c is below half the
/// smallest breakpoint gap, at most one bump is active at any x, and G maps
/// each bump window [b_j - c, b_j + c] onto itself. G is C^1 with Lipschitz
/// G'; G'' jumps by 4 alpha_j at b_j.
class Transform {
 public:
  Transform(std::vector<double> breakpoints, std::vector<double> alphas, double bump_halfwidth,
            double inverse_tolerance = 1e-12)
      : breakpoints_(std::move(breakpoints)),
        alphas_(std::move(alphas)),
        c_(bump_halfwidth),
        tol_(inverse_tolerance) {
    if (breakpoints_.size() != alphas_.size())
      throw DomainError("transform needs one alpha per breakpoint");
    for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
      if (!std::isfinite(alphas_[j])) throw DomainError("alpha must be finite");
      if (j > 0 && !(breakpoints_[j - 1] < breakpoints_[j]))
        throw DomainError("transform breakpoints must be strictly increasing");
    }
    if (!(tol_ > 0.0)) throw DomainError("inverse tolerance must be positive");
    identity_ = std::all_of(alphas_.begin(), alphas_.end(), [](double a) { return a == 0.0; });
    const double sup = admissible_supremum(breakpoints_, alphas_);
    if (!(c_ > 0.0) || !std::isfinite(c_) || !(c_ < sup))
      throw DomainError("bump half-width " + std::to_string(c_) +
                        " outside the admissible interval (0, " + std::to_string(sup) + ")");
    for (double a : alphas_) bump_bound_ = std::max(bump_bound_, std::abs(a) * c_ * c_);
  }

  /// min{ min_j 1/(6|alpha_j|), min_j (b_{j+1} - b_j)/2 } with 1/0 = inf.
  static double admissible_supremum(std::span<const double> breakpoints,
                                    std::span<const double> alphas) {
    double sup = std::numeric_limits<double>::infinity();
    for (double a : alphas)
      if (a != 0.0) sup = std::min(sup, 1.0 / (6.0 * std::abs(a)));
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
      sup = std::min(sup, (breakpoints[j + 1] - breakpoints[j]) / 2.0);
    return sup;
  }

  /// Builds G for a drift; c is safety_fraction times the admissible supremum,
  /// or 1 when the supremum is infinite.
  static Transform build(const PiecewiseDrift& drift, double safety_fraction = 0.5,
                         double inverse_tolerance = 1e-12) {
    if (!(safety_fraction > 0.0 && safety_fraction < 1.0))
      throw DomainError("safety_fraction must lie in (0, 1)");
    std::vector<double> bps(drift.breakpoints().begin(), drift.breakpoints().end());
    std::vector<double> alphas(bps.size());
    for (std::size_t j = 0; j < bps.size(); ++j)
      alphas[j] = (drift.left_limits()[j] - drift.right_limits()[j]) / 2.0;
    const double sup = admissible_supremum(bps, alphas);
    const double c = std::isfinite(sup) ? safety_fraction * sup : 1.0;
    return Transform(std::move(bps), std::move(alphas), c, inverse_tolerance);
  }

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> alphas() const noexcept { return alphas_; }
  double bump_halfwidth() const noexcept { return c_; }
  double inverse_tolerance() const noexcept { return tol_; }
  bool is_identity() const noexcept { return identity_; }
  /// B = max_j |alpha_j| c^2 bounds |G(x) - x|.
  double bump_bound() const noexcept { return bump_bound_; }

  double operator()(double x) const noexcept { return value(x); }

  double value(double x) const noexcept {
    auto j = active_bump(x);
    if (!j) return x;
    const double s = x - breakpoints_[*j];
    return x + alphas_[*j] * Bump::phi(s / c_) * s * std::abs(s);
  }

  double derivative(double x) const noexcept {
    auto j = active_bump(x);
    if (!j) return 1.0;
    const double s = x - breakpoints_[*j];
    const double u = s / c_;
    return 1.0 + alphas_[*j] * (Bump::phi_prime(u) / c_ * s * std::abs(s) +
                                2.0 * Bump::phi(u) * std::abs(s));
  }

  /// One-sided second derivative; the sides differ only at breakpoints, where
  /// the right value is 2 alpha_j and the left value -2 alpha_j.
  double second_derivative(double x, Side side = Side::right) const noexcept {
    auto j = active_bump(x);
    if (!j) return 0.0;
    const double s = x - breakpoints_[*j];
    const double u = s / c_;
    double sgn = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : (side == Side::right ? 1.0 : -1.0));
    return alphas_[*j] * (Bump::phi_second(u) / (c_ * c_) * s * std::abs(s) +
                          4.0 * Bump::phi_prime(u) / c_ * std::abs(s) +
                          2.0 * Bump::phi(u) * sgn);
  }

  /// G^{-1}(y): identity outside the bump windows, otherwise Newton steps
  /// safeguarded by bisection inside [y - B, y + B] intersected with the window.
  double inverse(double y) const {
    if (!std::isfinite(y)) throw DomainError("G^{-1} evaluated at a non-finite value");
    auto j = active_bump(y);
    if (!j) return y;
    const double b = breakpoints_[*j];
    double lo = std::max(y - bump_bound_, b - c_);
    double hi = std::min(y + bump_bound_, b + c_);
    double x = y;
    constexpr int kMaxIterations = 10000;
    for (int it = 0; it < kMaxIterations; ++it) {
      const double f = value(x) - y;
      if (std::abs(f) <= tol_) return x;
      if (f > 0.0)
        hi = x;
      else
        lo = x;
      const double step = f / derivative(x);
      double next = x - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == x) return x;
      x = next;
    }
    throw NumericError("G^{-1} failed to converge for y = " + std::to_string(y));
  }

 private:
  std::optional<std::size_t> active_bump(double x) const noexcept {
    if (identity_) return std::nullopt;
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - breakpoints_.begin());
    if (hi < breakpoints_.size() && alphas_[hi] != 0.0 && std::abs(x - breakpoints_[hi]) < c_)
      return hi;
    if (hi > 0 && alphas_[hi - 1] != 0.0 && std::abs(x - breakpoints_[hi - 1]) < c_)
      return hi - 1;
    return std::nullopt;
  }

  std::vector<double> breakpoints_;
  std::vector<double> alphas_;
  double c_;
  double tol_;
  double bump_bound_ = 0.0;
  bool identity_ = false;
};

inline Transform build_transform(const PiecewiseDrift& drift, double safety_fraction = 0.5) {
  return Transform::build(drift, safety_fraction);
}
inline double g_eval(const Transform& t, double x) { return t.value(x); }
inline double g_prime(const Transform& t, double x) { return t.derivative(x); }
inline double g_second(const Transform& t, double x, Side side) {
  return t.second_derivative(x, side);
}
inline double g_inverse(const Transform& t, double y) { return t.inverse(y); }

/// Everything a scheme step needs at one transformed state, from a single
/// inversion of G.
struct LocalCoefficients {
  double x;            ///< G^{-1}(z)
  double mu;           ///< mu~(z)
  double sigma;        ///< sigma~(z)
  double sigma_prime;  ///< quasi-derivative of sigma~ at z
};

/// Coefficients of the transformed SDE dZ = mu~ dt + sigma~ dW + rho~ dN:
///   mu~ = (G' mu + G''/2) o G^{-1},  sigma~ = G' o G^{-1},
///   rho~(z) = G(G^{-1}(z) + 1) - z.
/// At breakpoints mu and G'' take their right-sided values; the composition
/// mu~ is the same from either side.
class TransformedCoefficients {
 public:
  TransformedCoefficients(PiecewiseDrift drift, Transform transform)
      : drift_(std::move(drift)), transform_(std::move(transform)) {}

  static TransformedCoefficients build(const PiecewiseDrift& drift, double safety_fraction = 0.5) {
    return TransformedCoefficients(drift, Transform::build(drift, safety_fraction));
  }

  const PiecewiseDrift& drift() const noexcept { return drift_; }
  const Transform& transform() const noexcept { return transform_; }

  LocalCoefficients local(double z) const {
    const double x = transform_.inverse(z);
    const double gp = transform_.derivative(x);
    const double gpp = transform_.second_derivative(x, Side::right);
    return {x, gp * drift_.value(x) + 0.5 * gpp, gp, gpp / gp};
  }

  double mu_tilde(double z) const { return local(z).mu; }
  double sigma_tilde(double z) const { return transform_.derivative(transform_.inverse(z)); }
  double sigma_tilde_quasi_derivative(double z) const { return local(z).sigma_prime; }
  double rho_tilde(double z) const { return post_jump(z) - z; }

  /// z + rho~(z) evaluated as G(G^{-1}(z) + 1).
  double post_jump(double z) const { return transform_.value(transform_.inverse(z) + 1.0); }

 private:
  PiecewiseDrift drift_;
  Transform transform_;
};

inline double mu_tilde(const TransformedCoefficients& tc, double z) { return tc.mu_tilde(z); }
inline double sigma_tilde(const TransformedCoefficients& tc, double z) { return tc.sigma_tilde(z); }
inline double sigma_tilde_quasi_derivative(const TransformedCoefficients& tc, double z) {
  return tc.sigma_tilde_quasi_derivative(z);
}
inline double rho_tilde(const TransformedCoefficients& tc, double z) { return tc.rho_tilde(z); }

}  // namespace jdsde
