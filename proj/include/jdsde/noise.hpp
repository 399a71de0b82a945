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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace jdsde {

/// Identifies one path of an experiment. Every random quantity of the path is
/// a pure function of this pair.
struct PathSeed {
  std::uint64_t experiment_seed = 0;
  std::uint64_t path_index = 0;
};

/// Sorted distinct times in [0, 1]: the equidistant points i/n merged with
/// the jump times. is_jump[i] flags nodes that are jump times.
struct JumpAdaptedGrid {
  std::vector<double> nodes;
  std::vector<std::uint8_t> is_jump;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t cells() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
};

inline void require_resolution(std::int64_t n) {
  if (n < 1) throw DomainError("grid resolution must be at least 1");
}

inline JumpAdaptedGrid build_jump_adapted_grid(std::int64_t n, std::span<const double> jump_times) {
  require_resolution(n);
  std::vector<double> jumps(jump_times.begin(), jump_times.end());
  for (double t : jumps)
    if (!(t > 0.0 && t < 1.0))
      throw DomainError("jump time " + std::to_string(t) + " outside (0, 1)");
  std::sort(jumps.begin(), jumps.end());

  JumpAdaptedGrid grid;
  grid.nodes.reserve(static_cast<std::size_t>(n) + 1 + jumps.size());
  grid.is_jump.reserve(grid.nodes.capacity());
  std::size_t j = 0;
  const double dn = static_cast<double>(n);
  for (std::int64_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / dn;
    for (; j < jumps.size() && jumps[j] <= t; ++j) {
      if (!grid.nodes.empty() && grid.nodes.back() == jumps[j]) continue;
      if (jumps[j] == t) break;
      grid.nodes.push_back(jumps[j]);
      grid.is_jump.push_back(1);
    }
    const bool hit = j < jumps.size() && jumps[j] == t;
    grid.nodes.push_back(t);
    grid.is_jump.push_back(hit ? 1 : 0);
    if (hit) ++j;
  }
  return grid;
}

inline JumpAdaptedGrid equidistant_grid(std::int64_t n) { return build_jump_adapted_grid(n, {}); }

/// N_1 ~ Poisson(lambda), then N_1 sorted uniforms on (0, 1). Exact ties are
/// moved up by one ulp.
inline std::vector<double> sample_jump_times(double lambda, PathSeed seed) {
  CounterStream count_stream(seed.experiment_seed, seed.path_index, StreamId::jump_count);
  const std::uint32_t count = poisson_from_uniform(lambda, count_stream.next_open_uniform());
  CounterStream location_stream(seed.experiment_seed, seed.path_index, StreamId::jump_locations);
  std::vector<double> times(count);
  for (auto& t : times) t = location_stream.next_open_uniform();
  std::sort(times.begin(), times.end());
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) times[i] = std::nextafter(times[i - 1], 2.0);
    if (!(times[i] < 1.0)) throw NumericError("jump time tie could not be resolved below 1");
  }
  return times;
}

/// One realization of the driving pair (W, N) on [0, 1]: the jump times and
/// the Brownian increments over the master grid {i/n_master} merged with the
/// jump times.
class DrivingNoise {
 public:
  DrivingNoise(std::int64_t n_master, std::vector<double> jump_times,
               std::vector<double> increments, PathSeed seed = {})
      : n_master_(n_master),
        jump_times_(std::move(jump_times)),
        master_(build_jump_adapted_grid(n_master, jump_times_)),
        increments_(std::move(increments)),
        seed_(seed) {
    if (!std::is_sorted(jump_times_.begin(), jump_times_.end()) ||
        std::adjacent_find(jump_times_.begin(), jump_times_.end()) != jump_times_.end())
      throw DomainError("jump times must be strictly increasing");
    if (increments_.size() != master_.cells())
      throw DomainError("need one Brownian increment per master cell");
  }

  std::int64_t n_master() const noexcept { return n_master_; }
  std::span<const double> jump_times() const noexcept { return jump_times_; }
  const JumpAdaptedGrid& master_grid() const noexcept { return master_; }
  std::span<const double> brownian_increments() const noexcept { return increments_; }
  PathSeed path_seed() const noexcept { return seed_; }
  std::size_t jump_count() const noexcept { return jump_times_.size(); }

  /// W at every master node, W_0 = 0.
  std::vector<double> brownian_path() const {
    std::vector<double> w(master_.size(), 0.0);
    for (std::size_t i = 0; i < increments_.size(); ++i) w[i + 1] = w[i] + increments_[i];
    return w;
  }

  /// W_1 as the plain left-to-right sum of all master increments.
  double terminal_brownian() const {
    double s = 0.0;
    for (double d : increments_) s += d;
    return s;
  }

 private:
  std::int64_t n_master_;
  std::vector<double> jump_times_;
  JumpAdaptedGrid master_;
  std::vector<double> increments_;
  PathSeed seed_;
};

/// Brownian increments on the master grid, sqrt(width) * Phi^{-1}(u) drawn
/// cell by cell from the Gaussian stream.
inline DrivingNoise sample_brownian_on_master(std::int64_t n_master,
                                              std::vector<double> jump_times, PathSeed seed) {
  require_resolution(n_master);
  const auto grid = build_jump_adapted_grid(n_master, jump_times);
  CounterStream gauss(seed.experiment_seed, seed.path_index, StreamId::gaussian);
  std::vector<double> inc(grid.cells());
  for (std::size_t i = 0; i < inc.size(); ++i)
    inc[i] = std::sqrt(grid.nodes[i + 1] - grid.nodes[i]) *
             normal_quantile(gauss.next_open_uniform());
  return DrivingNoise(n_master, std::move(jump_times), std::move(inc), seed);
}

/// The full noise path for (lambda, seed) at master resolution n_master.
inline DrivingNoise sample_driving_noise(double lambda, std::int64_t n_master, PathSeed seed) {
  return sample_brownian_on_master(n_master, sample_jump_times(lambda, seed), seed);
}

/// Brownian increments over the cells of `coarse`, each the left-to-right
/// sum of the master increments it covers. Every coarse node must be a master
/// node.
inline std::vector<double> aggregate_increments(const DrivingNoise& noise,
                                                const JumpAdaptedGrid& coarse) {
  const auto& master = noise.master_grid().nodes;
  const auto inc = noise.brownian_increments();
  if (coarse.size() < 2 || coarse.nodes.front() != master.front() ||
      coarse.nodes.back() != master.back())
    throw CouplingError("coarse grid must span [0, 1]");
  std::vector<double> out(coarse.cells(), 0.0);
  std::size_t m = 0;
  for (std::size_t c = 0; c + 1 < coarse.size(); ++c) {
    const double end = coarse.nodes[c + 1];
    double s = 0.0;
    while (m < inc.size() && master[m + 1] <= end) {
      s += inc[m];
      ++m;
      if (master[m] == end) break;
    }
    if (master[m] != end)
      throw CouplingError("coarse node " + std::to_string(end) + " is not a master-grid node");
    out[c] = s;
  }
  return out;
}

/// Number of jumps in each cell (i/n, (i+1)/n].
inline std::vector<int> jump_counts(const DrivingNoise& noise, std::int64_t n) {
  require_resolution(n);
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  const double dn = static_cast<double>(n);
  std::size_t cell = 0;
  for (double t : noise.jump_times()) {
    while (static_cast<double>(cell + 1) / dn < t) ++cell;
    ++counts[cell];
  }
  return counts;
}

/// (W_{nu_1}, ..., W_{nu_N1}) zero-padded to `width` entries; jumps beyond
/// width are dropped (callers count such overflow separately).
inline std::vector<double> brownian_at_jump_times(const DrivingNoise& noise, std::size_t width) {
  std::vector<double> out(width, 0.0);
  const auto& grid = noise.master_grid();
  const auto inc = noise.brownian_increments();
  double w = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 1; i < grid.size() && k < width; ++i) {
    w += inc[i - 1];
    if (grid.is_jump[i]) out[k++] = w;
  }
  return out;
}

}  // namespace jdsde
