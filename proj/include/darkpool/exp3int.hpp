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

// Integral allocations from the exponentiated-gradient weights.
//
// Each round the fractional allocation a_i = f_i + q_i is split into floors
// and fractional parts. The parts (integer sum m) are mixed toward uniform
// with rate gamma and a subset of m venues is drawn with those inclusion
// probabilities; chosen venues play f_i + 1, the rest play f_i. The expected
// consumption then equals min(f_i + qbar_i, s_i).
//
// The weights are updated with an importance-weighted estimate of the
// per-unit subgradient 1(s_i >= a_i). For venue i, units up to kappa_i (the
// largest prefix whose cumulative weight stays within f_i) see
//   1(s >= f) - 1(s = f) 1(ceil played) / qbar,
// and units kappa_i < v <= V^t see
//   1(s >= a) 1(ceil played) / qbar.
// Both branches are computed from consumed amounts only.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "darkpool/core.hpp"
#include "darkpool/expgrad.hpp"
#include "darkpool/rounding.hpp"

namespace darkpool::exp3int {

struct Exp3Parameters {
  double eta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;  // only used when variance_corrected
  bool variance_corrected = false;
};

struct Exp3State {
  WeightMatrix weights;
  Exp3Parameters params;
};

struct RoundingPlan {
  FractionalAllocation alloc;
  std::vector<std::int64_t> floors;
  rounding::MarginalVector frac;   // q
  rounding::MarginalVector mixed;  // qbar
  std::vector<int> kappa;
  std::vector<std::uint8_t> ceil_played;
  IntegralAllocation played;

  int m() const { return frac.m; }
};

// Per-venue two-level gradient: `lower` on units v < kappa, `upper` on
// kappa <= v < volume (0-based units), zero above volume.
struct GradientEstimate {
  int volume = 0;
  std::vector<int> kappa;
  std::vector<double> lower;
  std::vector<double> upper;

  double at(int venue, int unit) const {
    if (unit >= volume) return 0.0;
    return unit < kappa[venue] ? lower[venue] : upper[venue];
  }
};

// f_i = floor(a_i), q_i = a_i - f_i; allocations within kAllocTol of an
// integer are snapped to it.
inline std::pair<std::vector<std::int64_t>, rounding::MarginalVector> decompose(const FractionalAllocation& a) {
  std::vector<std::int64_t> floors(a.alloc.size());
  std::vector<double> q(a.alloc.size());
  double total = 0.0;
  std::int64_t floor_sum = 0;
  for (std::size_t i = 0; i < a.alloc.size(); ++i) {
    total += a.alloc[i];
    const double nearest = std::round(a.alloc[i]);
    const double x = std::abs(a.alloc[i] - nearest) <= kAllocTol ? nearest : a.alloc[i];
    const double f = std::floor(x);
    floors[i] = static_cast<std::int64_t>(f);
    q[i] = x - f;
    floor_sum += floors[i];
  }
  if (std::abs(total - a.volume) > rounding::kSumTol)
    throw std::invalid_argument("decompose: allocation does not sum to the round volume");
  auto marginals = rounding::MarginalVector::from(std::move(q));
  if (marginals.m != a.volume - floor_sum) throw std::invalid_argument("decompose: fractional parts inconsistent");
  return {std::move(floors), std::move(marginals)};
}

// Largest v0 in [0, volume] with sum_{v < v0} x^v_i <= f_i (within kAllocTol).
inline std::vector<int> kappa(const WeightMatrix& w, std::span<const std::int64_t> floors, int volume) {
  const int k = w.venues();
  std::vector<double> prefix(k, 0.0);
  std::vector<int> out(k, 0);
  std::vector<std::uint8_t> open(k, 1);
  int still_open = k;
  for (int v = 0; v < volume && still_open > 0; ++v) {
    const auto row = w.row(v);
    for (int i = 0; i < k; ++i) {
      if (!open[i]) continue;
      prefix[i] += row[i];
      if (prefix[i] <= static_cast<double>(floors[i]) + kAllocTol) {
        out[i] = v + 1;
      } else {
        open[i] = 0;
        --still_open;
      }
    }
  }
  return out;
}

// Plays f_i + 1 on a sampled subset with marginals `mixed`.
inline IntegralAllocation randomized_round(std::span<const std::int64_t> floors, const rounding::MarginalVector& mixed,
                                           int volume, Rng& rng, std::vector<std::uint8_t>* ceil_played = nullptr) {
  IntegralAllocation out;
  out.volume = volume;
  out.alloc.assign(floors.begin(), floors.end());
  std::vector<std::uint8_t> ceil(floors.size(), 0);
  for (int i : rounding::sample_subset(mixed, rng)) {
    out.alloc[i] += 1;
    ceil[i] = 1;
  }
  if (ceil_played) *ceil_played = std::move(ceil);
  return out;
}

// Per-venue estimator values from what the venue reported.
struct VenueEstimate {
  double lower = 0.0;
  double upper = 0.0;
};

inline VenueEstimate estimate_venue(std::int64_t floor, double qbar, bool ceil_played, double consumed) {
  const double f = static_cast<double>(floor);
  VenueEstimate e;
  if (ceil_played) {
    // consumed = min(f + 1, s)
    const double ge_f = consumed >= f ? 1.0 : 0.0;
    const double eq_f = consumed == f ? 1.0 : 0.0;
    const double ge_ceil = consumed >= f + 1.0 ? 1.0 : 0.0;
    e.lower = ge_f - eq_f / qbar;
    e.upper = ge_ceil / qbar;
  } else {
    // consumed = min(f, s): s >= f iff nothing was left over.
    e.lower = consumed == f ? 1.0 : 0.0;
    e.upper = 0.0;
  }
  return e;
}

inline GradientEstimate estimate_gradient(const Observation& obs, const RoundingPlan& plan) {
  const auto k = plan.floors.size();
  if (obs.consumed.size() != k) throw std::invalid_argument("estimate_gradient: dimension mismatch");
  GradientEstimate g;
  g.volume = obs.volume;
  g.kappa = plan.kappa;
  g.lower.resize(k);
  g.upper.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto e = estimate_venue(plan.floors[i], plan.mixed.q[i], plan.ceil_played[i] != 0, obs.consumed[i]);
    g.lower[i] = e.lower;
    g.upper[i] = e.upper;
  }
  return g;
}

// Adds 10 gamma / (K qbar_i) sqrt(ln(1/delta)) to every active unit of venue
// i. Venues with qbar_i = 0 (no sampling this round) get no correction.
inline GradientEstimate variance_correct(GradientEstimate g, std::span<const double> qbar, double gamma,
                                         double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("variance_correct: delta must lie in (0, 1)");
  if (gamma < 0.0) throw std::invalid_argument("variance_correct: gamma must be >= 0");
  const double k = static_cast<double>(qbar.size());
  const double scale = std::sqrt(std::log(1.0 / delta));
  for (std::size_t i = 0; i < qbar.size(); ++i) {
    if (qbar[i] <= 0.0) continue;
    const double c = 10.0 * gamma / (k * qbar[i]) * scale;
    g.lower[i] += c;
    g.upper[i] += c;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

// (V (ln K)^2 / (K T^2))^(1/3).
inline double bound_tuned_eta(const ProblemDims& dims) {
  const double lnk = std::log(static_cast<double>(dims.venues));
  return std::cbrt(dims.max_volume * lnk * lnk / (static_cast<double>(dims.venues) * dims.horizon * dims.horizon));
}

// V ln K / eta + 2 eta (T V + T V K / gamma + T K) + gamma T K.
inline double expected_regret_bound(const ProblemDims& dims, double eta, double gamma) {
  const double v = dims.max_volume, k = dims.venues, t = dims.horizon;
  return v * std::log(k) / eta + 2.0 * eta * (t * v + t * v * k / gamma + t * k) + gamma * t * k;
}

inline double default_delta(const ProblemDims& dims) { return 1.0 / std::max(2, dims.horizon); }

// Largest |correction| term; 10 sqrt(ln 1/delta) since qbar_i >= gamma / K.
inline double correction_bound(double delta) { return 10.0 * std::sqrt(std::log(1.0 / delta)); }

// eta such that eta * |estimate| <= 1.
inline double clamped_eta(const ProblemDims& dims, double gamma, bool variance_corrected, double delta) {
  const double extra = variance_corrected ? correction_bound(delta) : 0.0;
  return std::min(bound_tuned_eta(dims), 1.0 / (1.0 + dims.venues / gamma + extra));
}

inline constexpr int kGammaGridPoints = 64;
inline constexpr double kGammaGridLow = 1e-4;
inline constexpr double kGammaGridHigh = 0.5;

inline std::vector<double> gamma_grid() {
  std::vector<double> grid(kGammaGridPoints);
  const double lo = std::log(kGammaGridLow), hi = std::log(kGammaGridHigh);
  for (int j = 0; j < kGammaGridPoints; ++j) grid[j] = std::exp(lo + (hi - lo) * j / (kGammaGridPoints - 1));
  return grid;
}

// gamma minimises the expected-regret bound over a log-spaced grid, with eta
// clamped for each candidate.
inline Exp3Parameters default_parameters(const ProblemDims& dims, bool variance_corrected = false) {
  dims.validate();
  Exp3Parameters best;
  best.variance_corrected = variance_corrected;
  best.delta = default_delta(dims);
  double best_bound = std::numeric_limits<double>::infinity();
  for (double gamma : gamma_grid()) {
    const double eta = clamped_eta(dims, gamma, variance_corrected, best.delta);
    const double b = expected_regret_bound(dims, eta, gamma);
    if (b < best_bound) {
      best_bound = b;
      best.eta = eta;
      best.gamma = gamma;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Algorithm
// ---------------------------------------------------------------------------

inline Exp3State init(const ProblemDims& dims, const Exp3Parameters& params) {
  dims.validate();
  if (!(params.eta > 0.0 && params.eta <= 1.0)) throw std::invalid_argument("exp3int::init: eta must lie in (0, 1]");
  if (!(params.gamma > 0.0 && params.gamma <= 0.5))
    throw std::invalid_argument("exp3int::init: gamma must lie in (0, 1/2]");
  if (params.variance_corrected && !(params.delta > 0.0 && params.delta < 1.0))
    throw std::invalid_argument("exp3int::init: delta must lie in (0, 1)");
  return {WeightMatrix::uniform(dims.max_volume, dims.venues), params};
}

// Everything up to (not including) the random draw.
inline RoundingPlan plan_round(const Exp3State& state, int volume) {
  RoundingPlan plan;
  plan.alloc = expgrad::allocate(state.weights, volume);
  auto [floors, frac] = decompose(plan.alloc);
  plan.floors = std::move(floors);
  plan.frac = std::move(frac);
  plan.mixed = rounding::mix_exploration(plan.frac, state.params.gamma);
  plan.kappa = kappa(state.weights, plan.floors, volume);
  return plan;
}

inline const IntegralAllocation& draw(RoundingPlan& plan, Rng& rng) {
  plan.played = randomized_round(plan.floors, plan.mixed, plan.alloc.volume, rng, &plan.ceil_played);
  return plan.played;
}

inline Exp3State update(Exp3State state, const RoundingPlan& plan, const Observation& obs) {
  auto g = estimate_gradient(obs, plan);
  if (state.params.variance_corrected)
    g = variance_correct(std::move(g), plan.mixed.q, state.params.gamma, state.params.delta);
  state.weights.exponentiate(obs.volume, state.params.eta, g.kappa, g.lower, g.upper);
  return state;
}

// One full round. `environment` maps the played allocation to liquidities.
template <typename Environment>
std::pair<Exp3State, RoundOutcome> step(Exp3State state, int volume, Environment&& environment, Rng& rng) {
  auto plan = plan_round(state, volume);
  const auto& played = draw(plan, rng);
  const std::vector<double> liquidity = environment(played);
  auto outcome = censor_feedback(played, liquidity);
  state = update(std::move(state), plan, outcome.feedback);
  return {std::move(state), std::move(outcome)};
}

}  // namespace darkpool::exp3int
