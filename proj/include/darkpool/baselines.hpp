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

// Estimate-then-allocate baselines for iid liquidities.
//
// Both keep per-venue censored histories: allocating u units and seeing r < u
// consumed reveals s = r exactly; r = u only reveals s >= u. From a tail
// estimate T_i(s) ~ P(s_i >= s) the expected-consumption-maximising integral
// allocation hands out units one at a time to the venue with the largest
// marginal gain T_i(u_i + 1).
//
//  * OptKM uses the product-limit (Kaplan-Meier) estimate. Levels with no
//    observations at risk contribute no hazard, so survival mass beyond the
//    deepest probe is carried forward rather than zeroed.
//  * ParML fits a Zero Bin + power law model by censored maximum likelihood.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "darkpool/core.hpp"
#include "darkpool/zbpl.hpp"

namespace darkpool::baselines {

struct CensoredSample {
  std::int64_t allocated = 0;
  std::int64_t consumed = 0;

  // consumed < allocated pins s down exactly; otherwise s >= allocated.
  bool exact() const { return consumed < allocated; }
};

// Survival estimate P(s >= u) for u = 1..levels (index u-1).
struct TailEstimate {
  std::vector<double> survival;

  double at(int level) const {
    if (level < 1) return 1.0;
    if (level > static_cast<int>(survival.size())) return 0.0;
    return survival[level - 1];
  }
};

// Sufficient statistics of one venue's censored history.
class CensoredCounts {
 public:
  void add(const CensoredSample& s) {
    if (s.consumed > s.allocated || s.consumed < 0) throw std::invalid_argument("CensoredSample: consumed > allocated");
    if (s.allocated <= 0) return;  // nothing learned
    if (s.exact()) {
      grow(exact_, s.consumed);
      exact_[s.consumed] += 1;
      if (s.consumed == 0)
        ++zeros_;
      else
        ++nonzero_;
    } else {
      grow(censored_, s.allocated);
      censored_[s.allocated] += 1;
      ++nonzero_;
    }
  }

  void add(std::int64_t allocated, double consumed) {
    add(CensoredSample{allocated, static_cast<std::int64_t>(std::llround(consumed))});
  }

  // Exact observations at level k (k >= 0).
  std::int64_t exact_at(std::size_t k) const { return k < exact_.size() ? exact_[k] : 0; }
  // Observations known only to satisfy s >= c (c >= 1).
  std::int64_t censored_at(std::size_t c) const { return c < censored_.size() ? censored_[c] : 0; }

  std::size_t exact_levels() const { return exact_.size(); }
  std::size_t censored_levels() const { return censored_.size(); }

  std::int64_t zeros() const { return zeros_; }
  // Informative samples known to be nonzero.
  std::int64_t nonzero() const { return nonzero_; }
  std::int64_t informative() const { return zeros_ + nonzero_; }

 private:
  static void grow(std::vector<std::int64_t>& v, std::int64_t idx) {
    if (static_cast<std::size_t>(idx) >= v.size()) v.resize(static_cast<std::size_t>(idx) + 1, 0);
  }

  std::vector<std::int64_t> exact_;
  std::vector<std::int64_t> censored_;
  std::int64_t zeros_ = 0;
  std::int64_t nonzero_ = 0;
};

inline CensoredCounts tally(std::span<const CensoredSample> history) {
  CensoredCounts c;
  for (const auto& s : history) c.add(s);
  return c;
}

// ---------------------------------------------------------------------------
// Kaplan-Meier
// ---------------------------------------------------------------------------

inline TailEstimate km_tail(const CensoredCounts& counts, int levels) {
  // at_risk(k) = #exact with s >= k + #censored with c > k.
  const std::size_t top = std::max({counts.exact_levels(), counts.censored_levels(), static_cast<std::size_t>(levels) + 1});
  std::vector<std::int64_t> exact_ge(top + 1, 0), censored_gt(top + 1, 0);
  for (std::size_t k = top; k-- > 0;) {
    exact_ge[k] = exact_ge[k + 1] + counts.exact_at(k);
    censored_gt[k] = censored_gt[k + 1] + counts.censored_at(k + 1);
  }
  TailEstimate t;
  t.survival.resize(levels);
  double s = 1.0;
  for (int u = 1; u <= levels; ++u) {
    const std::size_t k = static_cast<std::size_t>(u - 1);
    const auto n = exact_ge[k] + censored_gt[k];
    if (n > 0) s *= 1.0 - static_cast<double>(counts.exact_at(k)) / static_cast<double>(n);
    t.survival[u - 1] = s;
  }
  return t;
}

inline TailEstimate km_update(std::span<const CensoredSample> history, int levels) {
  return km_tail(tally(history), levels);
}

// ---------------------------------------------------------------------------
// Greedy allocation
// ---------------------------------------------------------------------------

// Unit by unit to the largest gain(i, u_i + 1); ties to the lowest venue
// index. A heap of each venue's next gain keeps this O(V log K).
template <typename Gain>
IntegralAllocation greedy_allocate_by(std::size_t venues, int volume, Gain&& gain) {
  IntegralAllocation out;
  out.volume = volume;
  out.alloc.assign(venues, 0);
  if (venues == 0 || volume <= 0) return out;
  using Entry = std::pair<double, std::size_t>;
  auto worse = [](const Entry& a, const Entry& b) { return a.first < b.first || (a.first == b.first && a.second > b.second); };
  std::vector<Entry> heap;
  heap.reserve(venues);
  for (std::size_t i = 0; i < venues; ++i) heap.emplace_back(gain(i, 1), i);
  std::make_heap(heap.begin(), heap.end(), worse);
  for (int unit = 0; unit < volume; ++unit) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    const std::size_t i = heap.back().second;
    const int next = static_cast<int>(++out.alloc[i]) + 1;
    heap.back().first = gain(i, next);
    std::push_heap(heap.begin(), heap.end(), worse);
  }
  return out;
}

inline IntegralAllocation greedy_allocate(std::span<const TailEstimate> tails, int volume) {
  return greedy_allocate_by(tails.size(), volume, [&](std::size_t i, int level) { return tails[i].at(level); });
}

// ---------------------------------------------------------------------------
// Parametric maximum likelihood
// ---------------------------------------------------------------------------

inline constexpr double kBetaLow = 1.01;
inline constexpr double kBetaHigh = 5.0;
inline constexpr double kBetaTol = 1e-4;
inline constexpr double kDefaultBeta = 2.0;

namespace detail {

// ln k and the smallest prime factor of k for k = 1..n (index k-1), cached
// per thread.
struct LevelTable {
  std::vector<double> log_k;
  std::vector<int> spf;
};

inline const LevelTable& level_table(int n) {
  thread_local LevelTable t;
  if (static_cast<int>(t.log_k.size()) < n) {
    t.log_k.resize(n);
    for (int k = 1; k <= n; ++k) t.log_k[k - 1] = std::log(static_cast<double>(k));
    t.spf.assign(n + 1, 0);
    for (int p = 2; p <= n; ++p)
      if (t.spf[p] == 0)
        for (int q = p; q <= n; q += p)
          if (t.spf[q] == 0) t.spf[q] = p;
  }
  return t;
}

// k^-beta for k = 1..n. The map is completely multiplicative, so only
// primes need an exp.
inline void inverse_powers(const LevelTable& t, int n, double beta, std::vector<double>& w) {
  w.resize(n);
  w[0] = 1.0;
  for (int k = 2; k <= n; ++k) {
    const int p = t.spf[k];
    w[k - 1] = p == k ? std::exp(-beta * t.log_k[k - 1]) : w[p - 1] * w[k / p - 1];
  }
}

}  // namespace detail

// Censored log-likelihood of the power-law part: exact k >= 1 contributes
// log pi(k), censored c >= 1 contributes log P(k >= c). Levels above s_max
// are clamped to s_max.
class PowerLawLikelihood {
 public:
  PowerLawLikelihood(const CensoredCounts& counts, int s_max) : s_max_(s_max), table_(detail::level_table(s_max)) {
    if (s_max < 1) throw std::invalid_argument("PowerLawLikelihood: s_max must be >= 1");
    for (std::size_t k = 1; k < counts.exact_levels(); ++k) {
      const auto n = counts.exact_at(k);
      if (n == 0) continue;
      const int level = std::min<int>(static_cast<int>(k), s_max);
      exact_log_sum_ += static_cast<double>(n) * table_.log_k[level - 1];
      exact_n_ += n;
    }
    for (std::size_t c = 1; c < counts.censored_levels(); ++c) {
      const auto n = counts.censored_at(c);
      if (n == 0) continue;
      const int level = std::min<int>(static_cast<int>(c), s_max);
      if (!censored_.empty() && censored_.back().first == level)
        censored_.back().second += n;
      else
        censored_.emplace_back(level, n);
    }
  }

  double operator()(double beta) const {
    detail::inverse_powers(table_, s_max_, beta, w_);
    // Suffix sums at the censored levels (ascending) and at 1.
    double tail = 0.0, ll = 0.0;
    int k = s_max_;
    for (auto it = censored_.rbegin(); it != censored_.rend(); ++it) {
      for (; k >= it->first; --k) tail += w_[k - 1];
      ll += static_cast<double>(it->second) * std::log(tail);
    }
    for (; k >= 1; --k) tail += w_[k - 1];
    const double log_z = std::log(tail);
    std::int64_t censored_n = 0;
    for (const auto& [level, n] : censored_) censored_n += n;
    return ll - beta * exact_log_sum_ - static_cast<double>(exact_n_ + censored_n) * log_z;
  }

 private:
  int s_max_;
  const detail::LevelTable& table_;
  double exact_log_sum_ = 0.0;
  std::int64_t exact_n_ = 0;
  std::vector<std::pair<int, std::int64_t>> censored_;
  mutable std::vector<double> w_;
};

inline double power_law_loglik(const CensoredCounts& counts, double beta, int s_max) {
  return PowerLawLikelihood(counts, s_max)(beta);
}

// Golden-section search for the maximiser of a unimodal function.
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double fit_beta(const CensoredCounts& counts, int s_max) {
  if (counts.nonzero() == 0) return kDefaultBeta;
  const PowerLawLikelihood ll(counts, s_max);
  return golden_section_max(ll, kBetaLow, kBetaHigh, kBetaTol);
}

// p0 is the observed zero fraction among informative samples; beta maximises
// the censored likelihood. No informative history gives the prior
// (p0 = 0, beta = kDefaultBeta).
inline ZbplParams parml_fit(const CensoredCounts& counts, int s_max) {
  ZbplParams p;
  p.s_max = s_max;
  p.p0 = counts.informative() == 0 ? 0.0
                                   : static_cast<double>(counts.zeros()) / static_cast<double>(counts.informative());
  p.beta = fit_beta(counts, s_max);
  return p;
}

inline ZbplParams parml_fit(std::span<const CensoredSample> history, int s_max) {
  return parml_fit(tally(history), s_max);
}

inline IntegralAllocation parml_allocate(std::span<const ZbplParams> params, int volume) {
  std::vector<TailEstimate> tails;
  tails.reserve(params.size());
  for (const auto& p : params) tails.push_back({zbpl_tail(p, volume)});
  return greedy_allocate(tails, volume);
}

// ---------------------------------------------------------------------------
// Online allocators
// ---------------------------------------------------------------------------

class OptKmAllocator {
 public:
  explicit OptKmAllocator(int venues) : counts_(venues), tails_(venues), fresh_(venues, 0) {}

  IntegralAllocation allocate(int volume) const {
    for (std::size_t i = 0; i < counts_.size(); ++i)
      if (!fresh_[i] || static_cast<int>(tails_[i].survival.size()) != volume) {
        tails_[i] = km_tail(counts_[i], volume);
        fresh_[i] = 1;
      }
    return greedy_allocate(tails_, volume);
  }

  void observe(const Observation& obs) {
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      const auto allocated = std::llround(obs.allocation[i]);
      if (allocated <= 0) continue;
      counts_[i].add(allocated, obs.consumed[i]);
      fresh_[i] = 0;
    }
  }

  const CensoredCounts& counts(int venue) const { return counts_[venue]; }

 private:
  std::vector<CensoredCounts> counts_;
  // Tail cache; a venue's estimate only moves when it was allocated to.
  mutable std::vector<TailEstimate> tails_;
  mutable std::vector<char> fresh_;
};

// p0 is refreshed every round; beta is refitted while a venue has few
// nonzero samples and afterwards whenever that count has grown by the factor
// (1 + refit_growth). refit_growth = 0 refits on every new sample.
class ParMlAllocator {
 public:
  static constexpr std::int64_t kAlwaysRefitBelow = 32;

  ParMlAllocator(int venues, int s_max, double refit_growth = 0.1)
      : s_max_(s_max), refit_growth_(refit_growth), counts_(venues), venues_(venues) {
    for (std::size_t i = 0; i < venues_.size(); ++i) {
      counts_[i].add(CensoredSample{s_max_, s_max_});
      refit(i);
    }
  }

  const ZbplParams& params(int venue) const { return venues_[venue].params; }

  IntegralAllocation allocate(int volume) const {
    return greedy_allocate_by(venues_.size(), volume, [&](std::size_t i, int level) {
      const auto& v = venues_[i];
      return level > s_max_ ? 0.0 : (1.0 - v.params.p0) * v.power_tail[level - 1];
    });
  }

  void observe(const Observation& obs) {
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      auto& c = counts_[i];
      const auto before = c.informative();
      c.add(std::llround(obs.allocation[i]), obs.consumed[i]);
      if (c.informative() == before) continue;
      auto& v = venues_[i];
      v.params.p0 = static_cast<double>(c.zeros()) / static_cast<double>(c.informative());
      const auto nz = c.nonzero();
      if (nz == v.fitted_at) continue;
      if (nz <= kAlwaysRefitBelow || static_cast<double>(nz) >= (1.0 + refit_growth_) * v.fitted_at) refit(i);
    }
  }

 private:
  void refit(std::size_t i) {
    auto& v = venues_[i];
    const auto& c = counts_[i];
    v.params = parml_fit(c, s_max_);
    v.fitted_at = c.nonzero();
    v.power_tail = zbpl_tail({0.0, v.params.beta, s_max_}, s_max_);
  }

  struct VenueModel {
    ZbplParams params;
    std::vector<double> power_tail;  // P(k >= u | k >= 1), u = 1..s_max
    std::int64_t fitted_at = 0;
  };

  int s_max_;
  double refit_growth_;
  std::vector<CensoredCounts> counts_;
  std::vector<VenueModel> venues_;
};

}  // namespace darkpool::baselines
