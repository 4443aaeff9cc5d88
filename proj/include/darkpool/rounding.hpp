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

// Fixed-size subsets with prescribed inclusion probabilities.
//
// Given q in [0,1)^K with integer sum m, sample_subset draws a subset S with
// |S| = m exactly and P(i in S) = q_i, by pairwise pivotal rounding: two
// fractional coordinates trade mass until one of them is 0 or 1, with the
// direction chosen so the expected change of each coordinate is zero.
//
// greedy_distribution builds an explicit distribution over m-subsets whose
// marginals approximate q, by a fully corrective greedy scheme in the
// Euclidean space of marginal vectors (Wolfe's minimum-norm-point iteration
// over the polytope spanned by the m-subset indicators).

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "darkpool/core.hpp"

namespace darkpool::rounding {

inline constexpr double kSumTol = 1e-7;

struct MarginalVector {
  std::vector<double> q;
  int m = 0;

  int size() const { return static_cast<int>(q.size()); }

  // Validates entries in [0, 1) and snaps the sum to the nearest integer.
  static MarginalVector from(std::vector<double> q) {
    double sum = 0.0;
    for (double x : q) {
      if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("MarginalVector: entries must lie in [0, 1)");
      sum += x;
    }
    const double m = std::round(sum);
    if (std::abs(sum - m) > kSumTol) throw std::invalid_argument("MarginalVector: entries must sum to an integer");
    return {std::move(q), static_cast<int>(m)};
  }
};

// Venue ids (0-based, ascending) of a subset with |S| = q.m.
inline std::vector<int> sample_subset(const MarginalVector& marginals, Rng& rng) {
  std::vector<int> chosen;
  if (marginals.m == 0) return chosen;
  std::vector<double> p = marginals.q;
  const int k = static_cast<int>(p.size());
  int pivot = -1;
  for (int i = 0; i < k; ++i) {
    if (p[i] == 0.0 || p[i] == 1.0) continue;
    if (pivot < 0) {
      pivot = i;
      continue;
    }
    // up: pivot gains `up`, i loses it; down: pivot loses `down`, i gains it.
    const double up = std::min(1.0 - p[pivot], p[i]);
    const double down = std::min(p[pivot], 1.0 - p[i]);
    if (rng.uniform() * (up + down) < down) {
      const bool pivot_full = up == 1.0 - p[pivot];
      const bool i_empty = up == p[i];
      p[pivot] = pivot_full ? 1.0 : p[pivot] + up;
      p[i] = i_empty ? 0.0 : p[i] - up;
    } else {
      const bool pivot_empty = down == p[pivot];
      const bool i_full = down == 1.0 - p[i];
      p[pivot] = pivot_empty ? 0.0 : p[pivot] - down;
      p[i] = i_full ? 1.0 : p[i] + down;
    }
    const bool pivot_done = p[pivot] == 0.0 || p[pivot] == 1.0;
    const bool i_done = p[i] == 0.0 || p[i] == 1.0;
    if (pivot_done) pivot = i_done ? -1 : i;
  }
  int ones = 0;
  for (int i = 0; i < k; ++i)
    if (p[i] == 1.0) ++ones;
  // Float drift can leave one coordinate within rounding error of 0 or 1.
  if (pivot >= 0) p[pivot] = (ones < marginals.m) ? 1.0 : 0.0;
  chosen.reserve(marginals.m);
  for (int i = 0; i < k; ++i)
    if (p[i] == 1.0) chosen.push_back(i);
  if (static_cast<int>(chosen.size()) != marginals.m)
    throw std::logic_error("sample_subset: cardinality drifted; marginals inconsistent");
  return chosen;
}

// (1 - gamma) q + gamma m / K. Keeps the sum and lifts every entry to at least
// gamma m / K.
inline MarginalVector mix_exploration(const MarginalVector& marginals, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 0.5)) throw std::invalid_argument("mix_exploration: gamma must lie in [0, 1/2]");
  MarginalVector out = marginals;
  const double floor = gamma * marginals.m / static_cast<double>(marginals.size());
  for (double& x : out.q) x = (1.0 - gamma) * x + floor;
  return out;
}

// ---------------------------------------------------------------------------
// Explicit distributions
// ---------------------------------------------------------------------------

struct Atom {
  std::vector<int> subset;  // ascending venue ids, |subset| = m
  double prob = 0.0;
};

struct SubsetDistribution {
  std::vector<Atom> atoms;
  std::vector<double> residual;  // target marginal minus achieved marginal

  std::vector<double> marginals() const {
    std::vector<double> out(residual.size(), 0.0);
    for (const auto& a : atoms)
      for (int i : a.subset) out[i] += a.prob;
    return out;
  }

  double residual_norm() const {
    double s = 0.0;
    for (double r : residual) s += r * r;
    return std::sqrt(s);
  }
};

namespace detail {

// The m largest entries of r, ties to the lowest index.
inline std::vector<int> top_m(std::span<const double> r, int m) {
  std::vector<int> idx(r.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return r[a] > r[b]; });
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

// Greedy construction with at most max_atoms atoms; stops early once the
// residual L2 norm is at most tol.
inline SubsetDistribution greedy_distribution(const MarginalVector& marginals, int max_atoms, double tol) {
  if (max_atoms < 1) throw std::invalid_argument("greedy_distribution: max_atoms must be >= 1");
  const int k = marginals.size();
  const int m = marginals.m;
  const Eigen::Map<const Eigen::VectorXd> q(marginals.q.data(), k);

  SubsetDistribution dist;
  if (m == 0) {
    dist.atoms.push_back({{}, 1.0});
    dist.residual = marginals.q;
    return dist;
  }

  // Corral of subsets with convex weights; points are 1_S - q.
  std::vector<std::vector<int>> corral;
  std::vector<double> lambda;
  auto point = [&](const std::vector<int>& s) {
    Eigen::VectorXd p = -q;
    for (int i : s) p[i] += 1.0;
    return p;
  };
  auto current = [&]() {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
    for (std::size_t j = 0; j < corral.size(); ++j) x += lambda[j] * point(corral[j]);
    return x;
  };

  corral.push_back(detail::top_m(marginals.q, m));
  lambda.push_back(1.0);
  Eigen::VectorXd x = current();

  const int max_major = 8 * max_atoms + 4 * k + 16;
  for (int major = 0; major < max_major; ++major) {
    if (x.norm() <= tol) break;
    const std::vector<double> r(x.data(), x.data() + k);
    std::vector<double> neg(k);
    for (int i = 0; i < k; ++i) neg[i] = -r[i];
    auto s = detail::top_m(neg, m);  // most negative x_i == largest residual
    const Eigen::VectorXd ps = point(s);
    // Optimality: no vertex improves on x.
    if (x.squaredNorm() - x.dot(ps) <= 1e-14 * std::max(1.0, x.squaredNorm())) break;
    if (static_cast<int>(corral.size()) >= max_atoms) break;
    if (std::find(corral.begin(), corral.end(), s) != corral.end()) break;
    corral.push_back(std::move(s));
    lambda.push_back(0.0);

    for (int minor = 0; minor < 4 * k + 16; ++minor) {
      const int n = static_cast<int>(corral.size());
      Eigen::MatrixXd pts(k, n);
      for (int j = 0; j < n; ++j) pts.col(j) = point(corral[j]);
      // Affine minimiser: [G 1; 1' 0][a; mu] = [0; 1].
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
      kkt.topLeftCorner(n, n) = pts.transpose() * pts;
      kkt.block(0, n, n, 1).setOnes();
      kkt.block(n, 0, 1, n).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
      rhs[n] = 1.0;
      const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      const Eigen::VectorXd alpha = sol.head(n);
      if ((alpha.array() > 1e-14).all()) {
        for (int j = 0; j < n; ++j) lambda[j] = alpha[j];
        break;
      }
      // Step toward the affine minimiser until a weight hits zero.
      double theta = 1.0;
      for (int j = 0; j < n; ++j)
        if (alpha[j] <= 1e-14) theta = std::min(theta, lambda[j] / (lambda[j] - alpha[j]));
      for (int j = 0; j < n; ++j) lambda[j] = (1.0 - theta) * lambda[j] + theta * alpha[j];
      std::vector<std::vector<int>> kept;
      std::vector<double> kept_lambda;
      for (int j = 0; j < n; ++j) {
        if (lambda[j] > 1e-14) {
          kept.push_back(std::move(corral[j]));
          kept_lambda.push_back(lambda[j]);
        }
      }
      corral = std::move(kept);
      lambda = std::move(kept_lambda);
      const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
      for (double& l : lambda) l /= total;
    }
    x = current();
  }

  const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  for (std::size_t j = 0; j < corral.size(); ++j) dist.atoms.push_back({corral[j], lambda[j] / total});
  dist.residual = marginals.q;
  for (const auto& a : dist.atoms)
    for (int i : a.subset) dist.residual[i] -= a.prob;
  return dist;
}

// Draws one atom's subset.
inline std::vector<int> sample(const SubsetDistribution& dist, Rng& rng) {
  if (dist.atoms.empty()) throw std::invalid_argument("sample: empty distribution");
  double u = rng.uniform();
  for (const auto& a : dist.atoms) {
    if (u < a.prob) return a.subset;
    u -= a.prob;
  }
  return dist.atoms.back().subset;
}

}  // namespace darkpool::rounding
