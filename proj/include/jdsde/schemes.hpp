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
#include <string>
#include <vector>

#include "drift.hpp"
#include "errors.hpp"
#include "noise.hpp"
#include "transform.hpp"

namespace jdsde {

/// Approximation on a time grid. states holds the post-jump value at each
/// node, pre_jump_states the left limit (equal to states off jump nodes).
struct SchemeTrajectory {
  std::vector<double> times;
  std::vector<std::uint8_t> is_jump;
  std::vector<double> states;
  std::vector<double> pre_jump_states;
};

enum class Scheme { euler_maruyama, ja_euler, ja_quasi_milstein };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::euler_maruyama: return "em";
    case Scheme::ja_euler: return "ja-euler";
    case Scheme::ja_quasi_milstein: return "ja-qmilstein";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  if (name == "em") return Scheme::euler_maruyama;
  if (name == "ja-euler") return Scheme::ja_euler;
  if (name == "ja-qmilstein") return Scheme::ja_quasi_milstein;
  throw ConfigurationError("unknown scheme '" + name + "' (expected em, ja-euler, ja-qmilstein)");
}

/// Non-adaptive Euler-Maruyama on {i/n} for the original equation. Uses only
/// the Brownian increments over the cells and the jump count of each cell.
inline SchemeTrajectory euler_maruyama(const JumpDiffusionProblem& problem,
                                       const DrivingNoise& noise, std::int64_t n) {
  const auto grid = equidistant_grid(n);
  const auto dw = aggregate_increments(noise, grid);
  const auto dn = jump_counts(noise, n);
  const double h = 1.0 / static_cast<double>(n);

  SchemeTrajectory traj;
  traj.times = grid.nodes;
  traj.is_jump.assign(grid.size(), 0);
  traj.states.resize(grid.size());
  traj.states[0] = problem.initial_value;
  for (std::size_t i = 0; i < dw.size(); ++i) {
    const double x = traj.states[i];
    traj.states[i + 1] = x + problem.drift.value(x) * h + dw[i] + dn[i];
  }
  traj.pre_jump_states = traj.states;
  return traj;
}

namespace detail {

template <bool kMilstein>
SchemeTrajectory jump_adapted(const TransformedCoefficients& tc, double xi,
                              const DrivingNoise& noise, std::int64_t n) {
  auto grid = build_jump_adapted_grid(n, noise.jump_times());
  const auto dw = aggregate_increments(noise, grid);

  SchemeTrajectory traj;
  traj.states.resize(grid.size());
  traj.pre_jump_states.resize(grid.size());
  double z = tc.transform().value(xi);
  traj.states[0] = traj.pre_jump_states[0] = z;
  for (std::size_t i = 0; i < dw.size(); ++i) {
    const double dt = grid.nodes[i + 1] - grid.nodes[i];
    const auto c = tc.local(z);
    double zm = z + c.mu * dt + c.sigma * dw[i];
    if constexpr (kMilstein) zm += 0.5 * c.sigma * c.sigma_prime * (dw[i] * dw[i] - dt);
    traj.pre_jump_states[i + 1] = zm;
    z = grid.is_jump[i + 1] ? tc.post_jump(zm) : zm;
    traj.states[i + 1] = z;
  }
  traj.times = std::move(grid.nodes);
  traj.is_jump = std::move(grid.is_jump);
  return traj;
}

}  // namespace detail

/// Jump-adapted Euler for the transformed equation, in Z coordinates, started
/// at G(xi). Diffusion step to each node, then the jump map at jump nodes.
inline SchemeTrajectory jump_adapted_euler(const TransformedCoefficients& tc, double xi,
                                           const DrivingNoise& noise, std::int64_t n) {
  return detail::jump_adapted<false>(tc, xi, noise, n);
}

/// Jump-adapted quasi-Milstein for the transformed equation, in Z
/// coordinates:
///   Z- = Z + mu~ dt + sigma~ dW + 1/2 sigma~ sigma~'_q (dW^2 - dt)
/// with the right-sided quasi-derivative sigma~'_q, followed by Z- + rho~(Z-)
/// at jump nodes.
inline SchemeTrajectory jump_adapted_quasi_milstein(const TransformedCoefficients& tc, double xi,
                                                    const DrivingNoise& noise, std::int64_t n) {
  return detail::jump_adapted<true>(tc, xi, noise, n);
}

/// Nodewise G^{-1} of a Z-coordinate trajectory.
inline SchemeTrajectory back_transform(SchemeTrajectory traj, const Transform& t) {
  if (t.is_identity()) return traj;
  for (auto& s : traj.states) s = t.inverse(s);
  for (auto& s : traj.pre_jump_states) s = t.inverse(s);
  return traj;
}

/// Runs `scheme` and returns the approximation of X (back-transformed where
/// the scheme works in Z coordinates).
inline SchemeTrajectory approximate(Scheme scheme, const JumpDiffusionProblem& problem,
                                    const TransformedCoefficients& tc, const DrivingNoise& noise,
                                    std::int64_t n) {
  switch (scheme) {
    case Scheme::euler_maruyama: return euler_maruyama(problem, noise, n);
    case Scheme::ja_euler:
      return back_transform(jump_adapted_euler(tc, problem.initial_value, noise, n),
                            tc.transform());
    case Scheme::ja_quasi_milstein:
      return back_transform(jump_adapted_quasi_milstein(tc, problem.initial_value, noise, n),
                            tc.transform());
  }
  throw ConfigurationError("unknown scheme");
}

inline double terminal_value(const SchemeTrajectory& traj) {
  if (traj.states.empty()) throw DomainError("empty trajectory");
  return traj.states.back();
}

/// max over the nodes of traj of |traj - reference| at equal times. Every node
/// of traj must also be a node of reference.
inline double discrete_sup_distance(const SchemeTrajectory& traj,
                                    const SchemeTrajectory& reference) {
  double sup = 0.0;
  std::size_t r = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    while (r < reference.times.size() && reference.times[r] < t) ++r;
    if (r == reference.times.size() || reference.times[r] != t)
      throw CouplingError("reference grid lacks node " + std::to_string(t));
    sup = std::max(sup, std::abs(traj.states[i] - reference.states[r]));
  }
  return sup;
}

}  // namespace jdsde
