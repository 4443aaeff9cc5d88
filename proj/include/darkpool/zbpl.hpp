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

// Zero Bin + power law liquidity model: s = 0 with probability p0, otherwise
// s = k in {1, ..., s_max} with P(k) proportional to k^-beta.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "darkpool/core.hpp"

namespace darkpool {

struct ZbplParams {
  double p0 = 0.5;
  double beta = 2.0;
  int s_max = 1;

  void validate() const {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("ZbplParams: p0 must lie in [0, 1]");
    if (!(beta > 1.0)) throw std::invalid_argument("ZbplParams: beta must exceed 1");
    if (s_max < 1) throw std::invalid_argument("ZbplParams: s_max must be >= 1");
  }

  bool operator==(const ZbplParams&) const = default;
};

// Normalised power-law masses pi(k), k = 1..s_max (index k-1).
inline std::vector<double> power_law_masses(double beta, int s_max) {
  std::vector<double> w(s_max);
  double z = 0.0;
  for (int k = 1; k <= s_max; ++k) z += (w[k - 1] = std::pow(static_cast<double>(k), -beta));
  for (double& x : w) x /= z;
  return w;
}

// P(s = k) for k = 0..s_max.
inline std::vector<double> zbpl_pmf(const ZbplParams& p) {
  std::vector<double> pmf(p.s_max + 1);
  pmf[0] = p.p0;
  const auto w = power_law_masses(p.beta, p.s_max);
  for (int k = 1; k <= p.s_max; ++k) pmf[k] = (1.0 - p.p0) * w[k - 1];
  return pmf;
}

// P(s >= u) for u = 1..levels (index u-1); zero beyond s_max.
inline std::vector<double> zbpl_tail(const ZbplParams& p, int levels) {
  const auto w = power_law_masses(p.beta, p.s_max);
  std::vector<double> suffix(p.s_max + 2, 0.0);
  for (int k = p.s_max; k >= 1; --k) suffix[k] = suffix[k + 1] + w[k - 1];
  std::vector<double> tail(levels, 0.0);
  for (int u = 1; u <= levels && u <= p.s_max; ++u) tail[u - 1] = (1.0 - p.p0) * std::min(1.0, suffix[u]);
  return tail;
}

inline double zbpl_mean(const ZbplParams& p) {
  const auto pmf = zbpl_pmf(p);
  double m = 0.0;
  for (int k = 1; k <= p.s_max; ++k) m += k * pmf[k];
  return m;
}

// Inverse-CDF sampler with a precomputed table.
class ZbplSampler {
 public:
  explicit ZbplSampler(const ZbplParams& p) : params_(p) {
    p.validate();
    cdf_ = power_law_masses(p.beta, p.s_max);
    for (std::size_t k = 1; k < cdf_.size(); ++k) cdf_[k] += cdf_[k - 1];
    cdf_.back() = 1.0;
  }

  const ZbplParams& params() const { return params_; }

  int operator()(Rng& rng) const {
    if (rng.uniform() < params_.p0) return 0;
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), params_.s_max - 1)) + 1;
  }

 private:
  ZbplParams params_;
  std::vector<double> cdf_;
};

inline int zbpl_sample(const ZbplParams& p, Rng& rng) { return ZbplSampler(p)(rng); }

}  // namespace darkpool
