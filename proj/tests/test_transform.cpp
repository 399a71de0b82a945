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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <jdsde/transform.hpp>

#include "test_helpers.hpp"

namespace jdsde {
namespace {

TEST(Phi, Values) {
  EXPECT_EQ(phi(0.0), 1.0);
  EXPECT_EQ(phi(1.0), 0.0);
  EXPECT_EQ(phi(-1.0), 0.0);
  EXPECT_EQ(phi(2.5), 0.0);
  EXPECT_DOUBLE_EQ(phi(0.5), 1.5 * 1.5 * 1.5 * 0.5 * 0.5 * 0.5);  // 0.421875
  EXPECT_DOUBLE_EQ(phi(0.5), 0.421875);
}

TEST(Phi, DerivativesMatchFiniteDifferences) {
  const double h = 1e-6;
  for (double u : {-0.9, -0.5, -0.1, 0.0, 0.3, 0.77}) {
    EXPECT_NEAR(Bump::phi_prime(u), (Bump::phi(u + h) - Bump::phi(u - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(Bump::phi_second(u), (Bump::phi_prime(u + h) - Bump::phi_prime(u - h)) / (2 * h),
                1e-7);
  }
}

TEST(BuildTransform, NegSign) {
  const auto t = build_transform(neg_sign_drift(), 0.5);
  ASSERT_EQ(t.alphas().size(), 1u);
  EXPECT_EQ(t.alphas()[0], 1.0);
  EXPECT_DOUBLE_EQ(t.bump_halfwidth(), 1.0 / 12.0);
  EXPECT_FALSE(t.is_identity());
}

TEST(BuildTransform, TwoBreakpoints) {
  const auto t = build_transform(testing::two_breakpoint_drift(), 0.5);
  ASSERT_EQ(t.alphas().size(), 2u);
  EXPECT_EQ(t.alphas()[0], 1.0);
  EXPECT_EQ(t.alphas()[1], 1.0);
  EXPECT_DOUBLE_EQ(t.bump_halfwidth(), 0.5 * std::min(1.0 / 6.0, 0.5));
}

TEST(BuildTransform, GapConstraintBinds) {
  // alpha = 0.1 allows c < 5/3, the gap 0.2 forces c < 0.1.
  auto d = piecewise_linear_drift({0.0, 0.2}, {0, 0, 0}, {0.1, -0.1, -0.3});
  const auto t = build_transform(d, 0.5);
  EXPECT_DOUBLE_EQ(t.bump_halfwidth(), 0.05);
}

TEST(BuildTransform, SmoothDriftGivesIdentity) {
  const auto t = build_transform(linear_drift(2.0), 0.5);
  EXPECT_TRUE(t.alphas().empty());
  EXPECT_TRUE(t.is_identity());
  EXPECT_EQ(t.bump_halfwidth(), 1.0);
  for (double x : {-3.0, 0.0, 0.7}) {
    EXPECT_EQ(g_eval(t, x), x);
    EXPECT_EQ(g_prime(t, x), 1.0);
    EXPECT_EQ(g_inverse(t, x), x);
  }
}

TEST(BuildTransform, RejectsBadInputs) {
  EXPECT_THROW(build_transform(neg_sign_drift(), 0.0), DomainError);
  EXPECT_THROW(build_transform(neg_sign_drift(), 1.0), DomainError);
  EXPECT_THROW(Transform({0.0}, {1.0}, 1.0 / 6.0), DomainError);  // c at the bound
  EXPECT_THROW(Transform({0.0}, {1.0}, 0.0), DomainError);
  EXPECT_NO_THROW(Transform({0.0}, {1.0}, 0.16));
}

class NegSignTransform : public ::testing::Test {
 protected:
  Transform t = build_transform(neg_sign_drift(), 0.5);
};

TEST_F(NegSignTransform, FixedPointAndIdentityRegion) {
  EXPECT_EQ(g_eval(t, 0.0), 0.0);
  EXPECT_EQ(g_eval(t, 0.5), 0.5);
  EXPECT_EQ(g_inverse(t, 0.5), 0.5);
  EXPECT_EQ(g_prime(t, 0.0), 1.0);
}

TEST_F(NegSignTransform, InsideBumpByHand) {
  // u = (1/24) / (1/12) = 1/2, phi = 0.421875
  EXPECT_NEAR(g_eval(t, 1.0 / 24.0), 1.0 / 24.0 + 0.421875 / 576.0, 1e-16);
  EXPECT_NEAR(g_eval(t, 1.0 / 24.0), 0.04239909, 1e-8);
  EXPECT_NEAR(g_eval(t, -1.0 / 24.0), -1.0 / 24.0 - 0.421875 / 576.0, 1e-16);
}

TEST_F(NegSignTransform, OneSidedSecondDerivativeAtBreakpoint) {
  EXPECT_EQ(g_second(t, 0.0, Side::right), 2.0);
  EXPECT_EQ(g_second(t, 0.0, Side::left), -2.0);
  const double h = 1e-6;
  const double right_fd = (g_prime(t, h) - g_prime(t, 0.0)) / h;
  const double left_fd = (g_prime(t, 0.0) - g_prime(t, -h)) / h;
  EXPECT_NEAR(right_fd, 2.0, 1e-4);
  EXPECT_NEAR(left_fd, -2.0, 1e-4);
}

TEST_F(NegSignTransform, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> pick(-0.2, 0.2);
  const double h = 1e-6;
  for (int i = 0; i < 2000; ++i) {
    const double x = pick(gen);
    if (std::abs(x) < 1e-4) continue;
    EXPECT_NEAR(g_prime(t, x), (g_eval(t, x + h) - g_eval(t, x - h)) / (2 * h), 1e-6);
    EXPECT_NEAR(g_second(t, x, Side::right), (g_prime(t, x + h) - g_prime(t, x - h)) / (2 * h),
                1e-4);
  }
}

TEST_F(NegSignTransform, MonotoneOnRandomPairs) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pick(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    double x = pick(gen), y = pick(gen);
    if (x == y) continue;
    if (x > y) std::swap(x, y);
    ASSERT_LT(g_eval(t, x), g_eval(t, y)) << x << " " << y;
  }
}

TEST_F(NegSignTransform, DerivativeBoundedBelow) {
  const double floor = 1.0 - 6.0 * std::abs(t.alphas()[0]) * t.bump_halfwidth();
  EXPECT_GT(floor, 0.0);
  double min_gp = 2.0;
  for (int i = -5000; i <= 5000; ++i) min_gp = std::min(min_gp, g_prime(t, i * 2e-5));
  EXPECT_GT(min_gp, 0.0);
  EXPECT_GE(min_gp, floor);
}

TEST_F(NegSignTransform, InverseIdentity) {
  for (double x : {-1.0, -1.0 / 24.0, 0.0, 1.0 / 24.0, 0.3, 2.0})
    EXPECT_NEAR(g_inverse(t, g_eval(t, x)), x, 1e-10);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> pick(-0.1, 0.1);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = pick(gen);
    worst = std::max(worst, std::abs(g_inverse(t, g_eval(t, x)) - x));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST_F(NegSignTransform, InverseRejectsNonFinite) {
  EXPECT_THROW(g_inverse(t, std::nan("")), DomainError);
}

TEST_F(NegSignTransform, GAndInverseLipschitzOnGrid) {
  double lg = 0.0, linv = 0.0;
  const double h = 1e-3;
  for (int i = -500; i < 500; ++i) {
    const double x = i * h;
    lg = std::max(lg, std::abs(g_eval(t, x + h) - g_eval(t, x)) / h);
    linv = std::max(linv, std::abs(g_inverse(t, x + h) - g_inverse(t, x)) / h);
  }
  EXPECT_LT(lg, 1.5);
  EXPECT_LT(linv, 1.5);
}

class NegSignCoefficients : public ::testing::Test {
 protected:
  TransformedCoefficients tc = TransformedCoefficients::build(neg_sign_drift(), 0.5);
};

TEST_F(NegSignCoefficients, MuTildeAtBreakpointImageIsMidpoint) {
  // G'(0) = 1; from the right -1 + 1, from the left 1 - 1.
  EXPECT_NEAR(mu_tilde(tc, 0.0), 0.0, 1e-12);
  EXPECT_EQ(mu_tilde(tc, 0.5), -1.0);
  EXPECT_EQ(mu_tilde(tc, -0.5), 1.0);
}

TEST_F(NegSignCoefficients, MuTildeIsContinuousAcrossBreakpoint) {
  // One-sided Lipschitz constant sampled away from the breakpoint, then the
  // crossing quotient must respect it.
  double k = 0.0;
  const double step = 1e-5;
  for (int i = 1; i < 8000; ++i) {
    const double z = i * step;
    k = std::max(k, std::abs(mu_tilde(tc, z + step) - mu_tilde(tc, z)) / step);
    k = std::max(k, std::abs(mu_tilde(tc, -z - step) - mu_tilde(tc, -z)) / step);
  }
  for (double h : {1e-3, 1e-4, 1e-5})
    EXPECT_LE(std::abs(mu_tilde(tc, h) - mu_tilde(tc, -h)), 1.01 * k * 2 * h) << h;
}

TEST_F(NegSignCoefficients, SigmaTilde) {
  EXPECT_EQ(sigma_tilde(tc, 0.0), 1.0);
  EXPECT_EQ(sigma_tilde(tc, 0.5), 1.0);
  EXPECT_EQ(sigma_tilde_quasi_derivative(tc, 0.5), 0.0);
  // right-sided convention at the breakpoint: G''(0+) / G'(0) = 2
  EXPECT_EQ(sigma_tilde_quasi_derivative(tc, 0.0), 2.0);
}

TEST_F(NegSignCoefficients, QuasiDerivativeMatchesFiniteDifference) {
  const double h = 1e-7;
  for (double z : {-0.07, -0.03, -0.004, 0.004, 0.02, 0.06}) {
    const double fd = (sigma_tilde(tc, z + h) - sigma_tilde(tc, z - h)) / (2 * h);
    EXPECT_NEAR(sigma_tilde_quasi_derivative(tc, z), fd, 1e-5) << z;
  }
}

TEST_F(NegSignCoefficients, RhoTilde) {
  EXPECT_DOUBLE_EQ(rho_tilde(tc, -0.5), 1.0);
  EXPECT_NEAR(rho_tilde(tc, -1.0 + 1.0 / 24.0), 1.0 + 0.421875 / 576.0, 1e-14);
  EXPECT_NEAR(rho_tilde(tc, -1.0 + 1.0 / 24.0), 1.000732422, 1e-9);
}

TEST_F(NegSignCoefficients, SampledLipschitzStableUnderRefinement) {
  auto sampled = [&](double lo, double hi, int pairs, auto f) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> pick(lo, hi);
    double l = 0.0;
    for (int i = 0; i < pairs; ++i) {
      const double a = pick(gen), b = pick(gen);
      if (a != b) l = std::max(l, std::abs(f(a) - f(b)) / std::abs(a - b));
    }
    return l;
  };
  auto mu = [&](double z) { return mu_tilde(tc, z); };
  auto sigma = [&](double z) { return sigma_tilde(tc, z); };
  auto rho = [&](double z) { return rho_tilde(tc, z); };
  // Quadrupling the sample count barely moves the estimate: a finite constant.
  const double coarse = sampled(-0.2, 0.2, 10000, mu);
  const double fine = sampled(-0.2, 0.2, 40000, mu);
  EXPECT_TRUE(std::isfinite(fine));
  EXPECT_LT(fine, 1.2 * coarse);
  // Analytic order of magnitude: |G'''| <= ~ alpha / c on the bump.
  EXPECT_LT(sampled(-1.2, 1.2, 10000, mu), 400.0);
  EXPECT_LT(sampled(-1.2, 1.2, 10000, sigma), 10.0);
  EXPECT_LT(sampled(-1.2, 1.2, 10000, rho), 10.0);
}

TEST(TwoBreakpointCoefficients, MidpointValuesAndContinuity) {
  const auto d = testing::two_breakpoint_drift();
  const auto tc = TransformedCoefficients::build(d, 0.5);
  const auto& g = tc.transform();
  EXPECT_EQ(g.value(0.0), 0.0);
  EXPECT_EQ(g.value(1.0), 1.0);
  EXPECT_NEAR(tc.mu_tilde(0.0), (2.0 + 0.0) / 2.0, 1e-12);
  EXPECT_NEAR(tc.mu_tilde(1.0), (-1.0 - 3.0) / 2.0, 1e-12);
  for (double zeta : {0.0, 1.0})
    for (double h : {1e-3, 1e-4, 1e-5})
      EXPECT_LE(std::abs(tc.mu_tilde(zeta + h) - tc.mu_tilde(zeta - h)), 400.0 * 2 * h);
}

TEST(Coefficients, SmoothDriftPassesThrough) {
  const auto tc = TransformedCoefficients::build(linear_drift(2.0), 0.5);
  EXPECT_EQ(tc.mu_tilde(3.0), 6.0);
  EXPECT_EQ(tc.sigma_tilde(3.0), 1.0);
  EXPECT_EQ(tc.sigma_tilde_quasi_derivative(3.0), 0.0);
  EXPECT_EQ(tc.rho_tilde(3.0), 1.0);
}

}  // namespace
}  // namespace jdsde
