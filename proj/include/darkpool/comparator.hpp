// Copyright 2026 The Darkpool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Best fixed unit-to-venue assignment in hindsight.
//
// An assignment maps each unit position v = 1..V to a venue; in round t the
// first V^t positions are live, so venue i receives u_i^t live units and
// earns min(u_i^t, s_i^t).
//
// With a constant volume the objective is separable concave in the per-venue
// unit counts and the greedy choice of marginal gains is optimal. When the
// volume varies, the gain of a unit depends on its position as well, so the
// problem is solved as a max-weight matching between positions and
// (venue, slot) pairs. Matching each venue's positions to its slots in
// sorted order never lowers the value, so the matching optimum is attained
// by a fixed assignment.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "darkpool/simulator.hpp"

namespace darkpool::comparator {

struct ComparatorValue {
  std::vector<int> assignment;  // venue (0-based) for each unit position
  double value = 0.0;
};

// Units per venue among the first `volume` positions.
inline std::vector<int> live_units(std::span<const int> assignment, int venues, int volume) {
  std::vector<int> u(venues, 0);
  for (int v = 0; v < volume; ++v) ++u[assignment[v]];
  return u;
}

// Reward of a fixed assignment in every round, cumulated: out[t] is the
// total over rounds 0..t.
inline std::vector<double> prefix_values(std::span<const int> assignment, const sim::LiquidityTrace& trace,
                                         std::span<const int> volumes) {
  if (static_cast<int>(volumes.size()) != trace.horizon)
    throw std::invalid_argument("comparator: volumes and trace lengths differ");
  std::vector<double> out(trace.horizon);
  double total = 0.0;
  for (int t = 0; t < trace.horizon; ++t) {
    if (volumes[t] > static_cast<int>(assignment.size()))
      throw std::invalid_argument("comparator: assignment shorter than round volume");
    const auto u = live_units(assignment, trace.venues, volumes[t]);
    for (int i = 0; i < trace.venues; ++i) total += std::min<double>(u[i], trace.at(t, i));
    out[t] = total;
  }
  return out;
}

inline double assignment_value(std::span<const int> assignment, const sim::LiquidityTrace& trace,
                               std::span<const int> volumes) {
  const auto p = prefix_values(assignment, trace, volumes);
  return p.empty() ? 0.0 : p.back();
}

namespace detail {

inline double unit_gain(double s, int slot) { return std::clamp(s - slot, 0.0, 1.0); }

// Rectangular assignment (rows <= cols) minimising total cost; returns the
// column for each row. Shortest augmenting path with potentials.
inline std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n == 0 ? 0 : static_cast<int>(cost.front().size());
  if (n > m) throw std::invalid_argument("min_cost_assignment: more rows than columns");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) col[p[j] - 1] = j - 1;
  return col;
}

}  // namespace detail

// Greedy over marginal gains for a volume that is the same every round.
// Positions beyond that volume never earn anything and go to venue 0.
inline ComparatorValue greedy(const sim::LiquidityTrace& trace, int units, int volume) {
  if (volume < 0 || volume > units) throw std::invalid_argument("comparator: volume out of range");
  const int k = trace.venues;
  // gain[i][c]: reward of venue i's (c+1)-th unit summed over rounds.
  std::vector<std::vector<double>> gain(k, std::vector<double>(volume, 0.0));
  for (int t = 0; t < trace.horizon; ++t)
    for (int i = 0; i < k; ++i) {
      const double s = trace.at(t, i);
      const int top = static_cast<int>(std::min<double>(volume, std::ceil(s)));
      for (int c = 0; c < top; ++c) gain[i][c] += detail::unit_gain(s, c);
    }
  ComparatorValue out;
  out.assignment.assign(units, 0);
  std::vector<int> used(k, 0);
  for (int v = 0; v < volume; ++v) {
    int best = 0;
    for (int i = 1; i < k; ++i)
      if (gain[i][used[i]] > gain[best][used[best]]) best = i;
    out.value += gain[best][used[best]];
    out.assignment[v] = best;
    ++used[best];
  }
  return out;
}

// Exact optimum for arbitrary volume sequences.
inline ComparatorValue matching(const sim::LiquidityTrace& trace, std::span<const int> volumes, int units) {
  const int k = trace.venues;
  // by_volume[i][c][w]: gain of venue i's slot c summed over rounds with V^t = w.
  std::vector<double> by_volume(static_cast<std::size_t>(k) * units * (units + 1), 0.0);
  auto at = [&](int i, int c, int w) -> double& {
    return by_volume[(static_cast<std::size_t>(i) * units + c) * (units + 1) + w];
  };
  for (int t = 0; t < trace.horizon; ++t) {
    const int w = volumes[t];
    for (int i = 0; i < k; ++i) {
      const double s = trace.at(t, i);
      const int top = static_cast<int>(std::min<double>(w, std::ceil(s)));
      for (int c = 0; c < top; ++c) at(i, c, w) += detail::unit_gain(s, c);
    }
  }
  // weight(position v, slot c of venue i) = sum over rounds with V^t >= v+1.
  std::vector<std::vector<double>> cost(units, std::vector<double>(static_cast<std::size_t>(k) * units, 0.0));
  for (int i = 0; i < k; ++i)
    for (int c = 0; c < units; ++c) {
      double tail = 0.0;
      for (int v = units - 1; v >= 0; --v) {
        tail += at(i, c, v + 1);
        cost[v][static_cast<std::size_t>(i) * units + c] = -tail;
      }
    }
  const auto col = detail::min_cost_assignment(cost);
  ComparatorValue out;
  out.assignment.resize(units);
  for (int v = 0; v < units; ++v) out.assignment[v] = col[v] / units;
  out.value = assignment_value(out.assignment, trace, volumes);
  return out;
}

// Dispatches on whether the volume sequence is constant.
inline ComparatorValue hindsight(const sim::LiquidityTrace& trace, std::span<const int> volumes, int units) {
  if (static_cast<int>(volumes.size()) != trace.horizon)
    throw std::invalid_argument("comparator: volumes and trace lengths differ");
  if (trace.horizon == 0) throw std::invalid_argument("comparator: empty trace");
  for (int w : volumes)
    if (w < 0 || w > units) throw std::invalid_argument("comparator: volume out of range");
  const bool constant = std::all_of(volumes.begin(), volumes.end(), [&](int w) { return w == volumes.front(); });
  if (constant) return greedy(trace, units, volumes.front());
  return matching(trace, volumes, units);
}

// Exhaustive search over all K^V assignments; small instances only.
inline ComparatorValue brute_force(const sim::LiquidityTrace& trace, std::span<const int> volumes, int units) {
  const int k = trace.venues;
  double combos = std::pow(static_cast<double>(k), units);
  if (combos > 1e7) throw std::invalid_argument("brute_force: instance too large");
  ComparatorValue best;
  best.value = -1.0;
  std::vector<int> a(units, 0);
  for (;;) {
    const double val = assignment_value(a, trace, volumes);
    if (val > best.value) best = {a, val};
    int pos = 0;
    while (pos < units && ++a[pos] == k) a[pos++] = 0;
    if (pos == units) break;
  }
  return best;
}

}  // namespace darkpool::comparator
