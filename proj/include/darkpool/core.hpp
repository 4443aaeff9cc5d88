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

// Shared domain types for the censored-allocation problem: dimensions, the
// per-unit weight matrix, allocations, round outcomes and seeded randomness.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace darkpool {

// Absolute tolerance for comparing real allocations against consumed amounts.
inline constexpr double kAllocTol = 1e-9;

// K venues, volume bound V, horizon T.
struct ProblemDims {
  int venues = 2;
  int max_volume = 1;
  int horizon = 1;

  void validate() const {
    if (venues < 2) throw std::invalid_argument("ProblemDims: need at least 2 venues");
    if (max_volume < 1) throw std::invalid_argument("ProblemDims: max_volume must be >= 1");
    if (horizon < 1) throw std::invalid_argument("ProblemDims: horizon must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Combines a seed with a stream label into a new, well-mixed seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Seedable deterministic stream. Uniform variates are built directly from the
// engine's bits so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform on {0, ..., n-1}; n >= 1.
  std::uint64_t uniform_int(std::uint64_t n) {
    // Lemire's rejection keeps this unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine_();
      const unsigned __int128 product = static_cast<unsigned __int128>(x) * n;
      if (static_cast<std::uint64_t>(product) >= threshold)
        return static_cast<std::uint64_t>(product >> 64);
    }
  }

  // Independent child stream; the parent is not advanced.
  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Stream labels used when splitting a trial's RNG.
enum class Stream : std::uint64_t { kEnvironment = 1, kAlgorithm = 2 };

inline Rng split(const Rng& rng, Stream s) { return rng.split(static_cast<std::uint64_t>(s)); }

// ---------------------------------------------------------------------------
// WeightMatrix: V rows, each a probability vector over K venues.
// ---------------------------------------------------------------------------

// Log weights are the source of truth; probabilities are a cached view kept
// consistent by multiplicative updates and resynchronised periodically, so
// entries that fall below the double range recover once they grow again.
class WeightMatrix {
 public:
  WeightMatrix() = default;

  static WeightMatrix uniform(int units, int venues) {
    if (units < 1 || venues < 1) throw std::invalid_argument("WeightMatrix: empty shape");
    WeightMatrix w;
    w.units_ = units;
    w.venues_ = venues;
    w.log_.assign(static_cast<std::size_t>(units) * venues, -std::log(static_cast<double>(venues)));
    w.prob_.assign(w.log_.size(), 1.0 / venues);
    w.updates_.assign(units, 0);
    return w;
  }

  // Builds from explicit rows; each row is normalised.
  static WeightMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw std::invalid_argument("WeightMatrix: empty rows");
    WeightMatrix w = uniform(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int v = 0; v < w.units_; ++v) {
      if (static_cast<int>(rows[v].size()) != w.venues_)
        throw std::invalid_argument("WeightMatrix: ragged rows");
      for (int i = 0; i < w.venues_; ++i) {
        if (!(rows[v][i] > 0.0)) throw std::invalid_argument("WeightMatrix: entries must be positive");
        w.log_[w.index(v, i)] = std::log(rows[v][i]);
      }
      w.resync_row(v);
    }
    return w;
  }

  int units() const { return units_; }
  int venues() const { return venues_; }

  double prob(int unit, int venue) const { return prob_[index(unit, venue)]; }
  double log_prob(int unit, int venue) const { return log_[index(unit, venue)]; }

  std::span<const double> row(int unit) const {
    return {prob_.data() + static_cast<std::size_t>(unit) * venues_, static_cast<std::size_t>(venues_)};
  }
  std::span<const double> log_row(int unit) const {
    return {log_.data() + static_cast<std::size_t>(unit) * venues_, static_cast<std::size_t>(venues_)};
  }

  // Multiplies rows 0..volume-1 by exp(eta * g(v, i)) and renormalises, where
  // the gradient takes the value lower[i] on units v < split[i] and upper[i]
  // on units split[i] <= v < volume. Rows at or above volume are untouched.
  void exponentiate(int volume, double eta, std::span<const int> split, std::span<const double> lower,
                    std::span<const double> upper) {
    if (volume < 0 || volume > units_) throw std::out_of_range("WeightMatrix: volume out of range");
    const auto k = static_cast<std::size_t>(venues_);
    if (split.size() != k || lower.size() != k || upper.size() != k)
      throw std::invalid_argument("WeightMatrix: gradient dimension mismatch");
    // Row factors start at the lower branch; venue i switches to the upper
    // branch at row split[i].
    std::vector<double> fac(k), add(k);
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) {
      fac[i] = std::exp(eta * lower[i]);
      add[i] = eta * lower[i];
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return split[a] < split[b]; });
    std::size_t next = 0;
    for (int v = 0; v < volume; ++v) {
      for (; next < k && split[order[next]] <= v; ++next) {
        const std::size_t i = order[next];
        fac[i] = std::exp(eta * upper[i]);
        add[i] = eta * upper[i];
      }
      double* p = prob_.data() + static_cast<std::size_t>(v) * k;
      double* lw = log_.data() + static_cast<std::size_t>(v) * k;
      for (std::size_t i = 0; i < k; ++i) {
        p[i] *= fac[i];
        lw[i] += add[i];
      }
      double z = 0.0;
      for (std::size_t i = 0; i < k; ++i) z += p[i];
      if (++updates_[v] % kResyncEvery == 0 || !(z > kTiny)) {
        resync_row(v);
        continue;
      }
      const double log_z = std::log(z);
      const double inv_z = 1.0 / z;
      for (std::size_t i = 0; i < k; ++i) {
        p[i] *= inv_z;
        lw[i] -= log_z;
      }
    }
  }

  // Row sums equal one within tol and all log weights are finite.
  bool valid(double tol = 1e-9) const {
    for (int v = 0; v < units_; ++v) {
      double s = 0.0;
      for (int i = 0; i < venues_; ++i) {
        if (!std::isfinite(log_[index(v, i)]) || prob_[index(v, i)] < 0.0) return false;
        s += prob_[index(v, i)];
      }
      if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
  }

 private:
  static constexpr int kResyncEvery = 256;
  static constexpr double kTiny = 1e-200;

  std::size_t index(int unit, int venue) const {
    return static_cast<std::size_t>(unit) * venues_ + static_cast<std::size_t>(venue);
  }

  void resync_row(int v) {
    const auto k = static_cast<std::size_t>(venues_);
    double* lw = log_.data() + static_cast<std::size_t>(v) * k;
    double* p = prob_.data() + static_cast<std::size_t>(v) * k;
    const double mx = *std::max_element(lw, lw + k);
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) z += std::exp(lw[i] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t i = 0; i < k; ++i) {
      lw[i] -= lse;
      p[i] = std::exp(lw[i]);
    }
  }

  int units_ = 0;
  int venues_ = 0;
  std::vector<double> log_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> updates_;
};

// ---------------------------------------------------------------------------
// Allocations and feedback
// ---------------------------------------------------------------------------

struct FractionalAllocation {
  std::vector<double> alloc;
  int volume = 0;
};

struct IntegralAllocation {
  std::vector<std::int64_t> alloc;
  int volume = 0;

  std::vector<double> as_real() const { return {alloc.begin(), alloc.end()}; }
};

// What an allocator is allowed to see after a round.
struct Observation {
  int volume = 0;
  std::vector<double> allocation;
  std::vector<double> consumed;
  std::vector<std::uint8_t> censor;  // g_i: 1 iff everything allocated was consumed

  double reward() const {
    double r = 0.0;
    for (double c : consumed) r += c;
    return r;
  }
};

// Full round record; liquidity is ground truth that only the harness reads.
struct RoundOutcome {
  Observation feedback;
  std::vector<double> liquidity;
};

inline std::vector<std::uint8_t> subgradient_bits(std::span<const double> allocation,
                                                  std::span<const double> consumed) {
  if (allocation.size() != consumed.size())
    throw std::invalid_argument("subgradient_bits: dimension mismatch");
  std::vector<std::uint8_t> g(allocation.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (allocation[i] - consumed[i] <= kAllocTol) ? 1 : 0;
  return g;
}

inline std::vector<std::uint8_t> subgradient_bits(const Observation& obs) {
  return subgradient_bits(obs.allocation, obs.consumed);
}

inline RoundOutcome censor_feedback(std::span<const double> allocation, std::span<const double> liquidity,
                                    int volume) {
  if (allocation.size() != liquidity.size())
    throw std::invalid_argument("censor_feedback: allocation and liquidity lengths differ");
  RoundOutcome out;
  out.liquidity.assign(liquidity.begin(), liquidity.end());
  out.feedback.volume = volume;
  out.feedback.allocation.assign(allocation.begin(), allocation.end());
  out.feedback.consumed.resize(allocation.size());
  for (std::size_t i = 0; i < allocation.size(); ++i) {
    if (liquidity[i] < 0.0) throw std::invalid_argument("censor_feedback: negative liquidity");
    if (allocation[i] < 0.0) throw std::invalid_argument("censor_feedback: negative allocation");
    out.feedback.consumed[i] = std::min(allocation[i], liquidity[i]);
  }
  out.feedback.censor = subgradient_bits(out.feedback.allocation, out.feedback.consumed);
  return out;
}

inline RoundOutcome censor_feedback(const FractionalAllocation& a, std::span<const double> liquidity) {
  return censor_feedback(a.alloc, liquidity, a.volume);
}

inline RoundOutcome censor_feedback(const IntegralAllocation& a, std::span<const double> liquidity) {
  const auto real = a.as_real();
  return censor_feedback(real, liquidity, a.volume);
}

}  // namespace darkpool
