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

// Environments: scenario descriptions, pre-drawn (oblivious) liquidity
// traces, and the allocation-dependent experts-reduction stream.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "darkpool/core.hpp"
#include "darkpool/zbpl.hpp"

namespace darkpool::sim {

// s = level with probability prob, 0 otherwise.
struct TwoPointParams {
  int level = 1;
  double prob = 0.5;

  void validate() const {
    if (level < 0) throw std::invalid_argument("TwoPointParams: level must be >= 0");
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("TwoPointParams: prob must lie in [0, 1]");
  }
  bool operator==(const TwoPointParams&) const = default;
};

using LiquidityModel = std::variant<ZbplParams, TwoPointParams>;

// Venue `venue` (0-based) draws from `model` on rounds start..end (1-based,
// inclusive).
struct Segment {
  int venue = 0;
  int start = 1;
  int end = 1;
  LiquidityModel model;
};

enum class ScenarioKind { kIid, kSwitching, kLowerBound, kExpertsReduction };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kIid: return "iid";
    case ScenarioKind::kSwitching: return "switching";
    case ScenarioKind::kLowerBound: return "lower_bound";
    case ScenarioKind::kExpertsReduction: return "experts_reduction";
  }
  return "?";
}

inline ScenarioKind parse_kind(const std::string& s) {
  if (s == "iid") return ScenarioKind::kIid;
  if (s == "switching") return ScenarioKind::kSwitching;
  if (s == "lower_bound") return ScenarioKind::kLowerBound;
  if (s == "experts_reduction") return ScenarioKind::kExpertsReduction;
  throw std::invalid_argument("unknown scenario kind: " + s);
}

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::kIid;
  ProblemDims dims;
  std::uint64_t seed = 0;
  std::vector<int> volumes;  // V^t, t = 1..T
  std::vector<Segment> segments;
  std::map<std::string, std::string> notes;  // construction parameters, echoed verbatim

  bool constant_volume() const {
    for (int v : volumes)
      if (v != volumes.front()) return false;
    return true;
  }

  // Every (venue, round) covered by exactly one segment; volumes within [0, V].
  void validate() const {
    dims.validate();
    if (static_cast<int>(volumes.size()) != dims.horizon)
      throw std::invalid_argument("Scenario: volume sequence length != horizon");
    for (int v : volumes)
      if (v < 0 || v > dims.max_volume) throw std::invalid_argument("Scenario: volume out of [0, V]");
    std::vector<int> cover(static_cast<std::size_t>(dims.venues) * dims.horizon, 0);
    for (const auto& s : segments) {
      if (s.venue < 0 || s.venue >= dims.venues) throw std::invalid_argument("Scenario: segment venue out of range");
      if (s.start < 1 || s.end > dims.horizon || s.start > s.end)
        throw std::invalid_argument("Scenario: segment bounds outside [1, T]");
      std::visit([](const auto& p) { p.validate(); }, s.model);
      for (int t = s.start; t <= s.end; ++t) ++cover[static_cast<std::size_t>(t - 1) * dims.venues + s.venue];
    }
    for (int c : cover)
      if (c != 1) throw std::invalid_argument("Scenario: every venue/round needs exactly one segment");
    if (kind == ScenarioKind::kExpertsReduction)
      for (const auto& s : segments) {
        const auto* tp = std::get_if<TwoPointParams>(&s.model);
        if (!tp || tp->level > 1)
          throw std::invalid_argument("Scenario: experts-reduction rewards must be two-point with level <= 1");
      }
  }

  const LiquidityModel& model_at(int venue, int round) const {
    for (const auto& s : segments)
      if (s.venue == venue && s.start <= round && round <= s.end) return s.model;
    throw std::out_of_range("Scenario: no segment covers venue/round");
  }
};

// Row-major T x K liquidities.
struct LiquidityTrace {
  int venues = 0;
  int horizon = 0;
  std::vector<double> values;

  double at(int t, int venue) const { return values[static_cast<std::size_t>(t) * venues + venue]; }
  std::span<const double> round(int t) const {
    return {values.data() + static_cast<std::size_t>(t) * venues, static_cast<std::size_t>(venues)};
  }
};

// Draws every venue's liquidity sequence. Each venue uses its own stream so
// the trace depends only on the scenario and the seed. For experts-reduction
// scenarios the result is the reward matrix rho.
inline LiquidityTrace draw_liquidities(const Scenario& sc, std::uint64_t env_seed) {
  sc.validate();
  LiquidityTrace tr{sc.dims.venues, sc.dims.horizon, {}};
  tr.values.assign(static_cast<std::size_t>(sc.dims.venues) * sc.dims.horizon, 0.0);
  const Rng root(env_seed);
  for (const auto& seg : sc.segments) {
    Rng rng = root.split(static_cast<std::uint64_t>(seg.venue) * 1000003ULL + static_cast<std::uint64_t>(seg.start));
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ZbplParams>) {
            const ZbplSampler sample(p);
            for (int t = seg.start; t <= seg.end; ++t)
              tr.values[static_cast<std::size_t>(t - 1) * sc.dims.venues + seg.venue] = sample(rng);
          } else {
            for (int t = seg.start; t <= seg.end; ++t)
              tr.values[static_cast<std::size_t>(t - 1) * sc.dims.venues + seg.venue] =
                  rng.bernoulli(p.prob) ? p.level : 0;
          }
        },
        seg.model);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Environment streams
// ---------------------------------------------------------------------------

class Environment {
 public:
  virtual ~Environment() = default;
  virtual int horizon() const = 0;
  virtual int venues() const = 0;
  virtual int volume(int t) const = 0;
  // Liquidities for round t (0-based). Oblivious streams ignore `allocation`.
  virtual std::vector<double> liquidity(int t, std::span<const double> allocation) = 0;
  // Real-valued liquidities that only make sense for fractional allocators.
  virtual bool continuous_only() const { return false; }
};

class ObliviousEnvironment final : public Environment {
 public:
  ObliviousEnvironment(std::vector<int> volumes, LiquidityTrace trace)
      : volumes_(std::move(volumes)), trace_(std::move(trace)) {}

  int horizon() const override { return trace_.horizon; }
  int venues() const override { return trace_.venues; }
  int volume(int t) const override { return volumes_[t]; }
  std::vector<double> liquidity(int t, std::span<const double>) override {
    const auto r = trace_.round(t);
    return {r.begin(), r.end()};
  }

  const LiquidityTrace& trace() const { return trace_; }

 private:
  std::vector<int> volumes_;
  LiquidityTrace trace_;
};

// s_i^t = rho_{t,i} * alloc_i^t with V^t = V: the round's reward is
// sum_i rho_{t,i} alloc_i^t, i.e. V times the expected reward of an experts
// algorithm playing p = alloc / V.
class ExpertsReductionEnvironment final : public Environment {
 public:
  ExpertsReductionEnvironment(std::vector<std::vector<double>> rho, int max_volume)
      : rho_(std::move(rho)), max_volume_(max_volume) {
    if (rho_.empty() || rho_.front().size() < 2) throw std::invalid_argument("experts reduction: need K >= 2");
    if (max_volume_ < 1) throw std::invalid_argument("experts reduction: V must be >= 1");
    for (const auto& row : rho_) {
      if (row.size() != rho_.front().size()) throw std::invalid_argument("experts reduction: ragged reward matrix");
      for (double r : row)
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("experts reduction: rewards must lie in [0, 1]");
    }
  }

  int horizon() const override { return static_cast<int>(rho_.size()); }
  int venues() const override { return static_cast<int>(rho_.front().size()); }
  int volume(int) const override { return max_volume_; }
  bool continuous_only() const override { return true; }

  std::vector<double> liquidity(int t, std::span<const double> allocation) override {
    const auto& row = rho_[t];
    if (allocation.size() != row.size()) throw std::invalid_argument("experts reduction: dimension mismatch");
    std::vector<double> s(row.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = row[i] * allocation[i];
    return s;
  }

 private:
  std::vector<std::vector<double>> rho_;
  int max_volume_;
};

inline std::unique_ptr<Environment> make_experts_reduction(std::vector<std::vector<double>> rho, int max_volume) {
  return std::make_unique<ExpertsReductionEnvironment>(std::move(rho), max_volume);
}

inline std::unique_ptr<Environment> make_experts_reduction(const LiquidityTrace& rho, int max_volume) {
  std::vector<std::vector<double>> rows(rho.horizon);
  for (int t = 0; t < rho.horizon; ++t) rows[t].assign(rho.round(t).begin(), rho.round(t).end());
  return make_experts_reduction(std::move(rows), max_volume);
}

// Stream for one trial of a scenario.
inline std::unique_ptr<Environment> make_environment(const Scenario& sc, std::uint64_t env_seed) {
  auto trace = draw_liquidities(sc, env_seed);
  if (sc.kind == ScenarioKind::kExpertsReduction) return make_experts_reduction(trace, sc.dims.max_volume);
  return std::make_unique<ObliviousEnvironment>(sc.volumes, std::move(trace));
}

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Reconstructed defaults: per-venue p0 ~ U[p0_low, p0_high], beta ~
// U[beta_low, beta_high], s_max = 2 V.
struct IidConfig {
  int venues = 48;
  int horizon = 2000;
  int volume = 200;
  double p0_low = 0.3, p0_high = 0.9;
  double beta_low = 1.2, beta_high = 2.5;
};

inline Scenario make_iid(const std::string& name, std::uint64_t seed, const IidConfig& cfg) {
  Scenario sc;
  sc.name = name;
  sc.kind = ScenarioKind::kIid;
  sc.dims = {cfg.venues, cfg.volume, cfg.horizon};
  sc.seed = seed;
  sc.volumes.assign(cfg.horizon, cfg.volume);
  Rng rng = Rng(seed).split(0x1d);
  for (int i = 0; i < cfg.venues; ++i) {
    ZbplParams p;
    p.p0 = cfg.p0_low + (cfg.p0_high - cfg.p0_low) * rng.uniform();
    p.beta = cfg.beta_low + (cfg.beta_high - cfg.beta_low) * rng.uniform();
    p.s_max = 2 * cfg.volume;
    sc.segments.push_back({i, 1, cfg.horizon, p});
  }
  sc.notes = {{"p0_range", fmt_double(cfg.p0_low) + "," + fmt_double(cfg.p0_high)},
              {"beta_range", fmt_double(cfg.beta_low) + "," + fmt_double(cfg.beta_high)},
              {"s_max", std::to_string(2 * cfg.volume)}};
  sc.validate();
  return sc;
}

inline Scenario make_iid48(std::uint64_t seed, const IidConfig& cfg = {}) { return make_iid("iid48", seed, cfg); }

struct TwoVenueSwitchConfig {
  int horizon = 25000;
  int switch_round = 12500;  // last round of the first regime
  int volume = 20;
  ZbplParams favorable{0.3, 1.2, 40};
  ZbplParams unfavorable{0.9, 2.5, 40};
};

inline Scenario make_two_venue_switch(std::uint64_t seed, const TwoVenueSwitchConfig& cfg = {}) {
  Scenario sc;
  sc.name = "two_venue_switch";
  sc.kind = ScenarioKind::kSwitching;
  sc.dims = {2, cfg.volume, cfg.horizon};
  sc.seed = seed;
  sc.volumes.assign(cfg.horizon, cfg.volume);
  sc.segments = {{0, 1, cfg.switch_round, cfg.favorable},
                 {1, 1, cfg.switch_round, cfg.unfavorable},
                 {0, cfg.switch_round + 1, cfg.horizon, cfg.unfavorable},
                 {1, cfg.switch_round + 1, cfg.horizon, cfg.favorable}};
  sc.notes = {{"switch_round", std::to_string(cfg.switch_round)}};
  sc.validate();
  return sc;
}

// Venues 1 and 5 alternate between extreme betas in opposite phase; venues
// 2-4 alternate between milder values.
struct FiveVenueConfig {
  int horizon = 10000;
  int period = 2000;  // rounds per phase
  double p0 = 0.5;
  double extreme_good = 1.2, extreme_bad = 2.5;
  double mild_good = 1.6, mild_bad = 2.0;
};

inline Scenario make_five_venue(std::uint64_t seed, int volume, const FiveVenueConfig& cfg = {}) {
  if (volume < 1) throw std::invalid_argument("make_five_venue: volume must be >= 1");
  if (cfg.period < 1) throw std::invalid_argument("make_five_venue: period must be >= 1");
  Scenario sc;
  sc.name = "five_venue_v" + std::to_string(volume);
  sc.kind = ScenarioKind::kSwitching;
  sc.dims = {5, volume, cfg.horizon};
  sc.seed = seed;
  sc.volumes.assign(cfg.horizon, volume);
  const int s_max = 2 * volume;
  for (int start = 1, phase = 0; start <= cfg.horizon; start += cfg.period, ++phase) {
    const int end = std::min(cfg.horizon, start + cfg.period - 1);
    const bool even = phase % 2 == 0;
    const double b[5] = {even ? cfg.extreme_good : cfg.extreme_bad, even ? cfg.mild_good : cfg.mild_bad,
                         even ? cfg.mild_bad : cfg.mild_good, even ? cfg.mild_good : cfg.mild_bad,
                         even ? cfg.extreme_bad : cfg.extreme_good};
    for (int i = 0; i < 5; ++i) sc.segments.push_back({i, start, end, ZbplParams{cfg.p0, b[i], s_max}});
  }
  sc.notes = {{"period", std::to_string(cfg.period)},
              {"extreme_betas", fmt_double(cfg.extreme_good) + "," + fmt_double(cfg.extreme_bad)},
              {"mild_betas", fmt_double(cfg.mild_good) + "," + fmt_double(cfg.mild_bad)},
              {"p0", fmt_double(cfg.p0)}};
  sc.validate();
  return sc;
}

inline constexpr double kLowerBoundC = 0.25;

// c sqrt(K / (T V)) with c = 1/4.
inline double default_lower_bound_epsilon(int venues, int max_volume, int horizon) {
  return kLowerBoundC * std::sqrt(static_cast<double>(venues) / (static_cast<double>(horizon) * max_volume));
}

// Every venue has s = V with probability 1/2, except a uniformly chosen
// favoured venue with probability 1/2 + epsilon; s = 0 otherwise.
inline Scenario make_lower_bound(int venues, int max_volume, int horizon, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw std::invalid_argument("make_lower_bound: epsilon must lie in [0, 1/2)");
  Scenario sc;
  sc.name = "lower_bound";
  sc.kind = ScenarioKind::kLowerBound;
  sc.dims = {venues, max_volume, horizon};
  sc.dims.validate();
  sc.seed = seed;
  sc.volumes.assign(horizon, max_volume);
  Rng rng = Rng(seed).split(0x1b);
  const int favored = static_cast<int>(rng.uniform_int(venues));
  for (int i = 0; i < venues; ++i)
    sc.segments.push_back({i, 1, horizon, TwoPointParams{max_volume, i == favored ? 0.5 + epsilon : 0.5}});
  sc.notes = {{"favored", std::to_string(favored + 1)}, {"epsilon", fmt_double(epsilon)}};
  sc.validate();
  return sc;
}

// Expert i earns one unit per round with probability means[i]; the stream
// scales it by the allocation.
inline Scenario make_experts_scenario(const std::vector<double>& means, int max_volume, int horizon,
                                      std::uint64_t seed) {
  Scenario sc;
  sc.name = "experts_reduction";
  sc.kind = ScenarioKind::kExpertsReduction;
  sc.dims = {static_cast<int>(means.size()), max_volume, horizon};
  sc.seed = seed;
  sc.volumes.assign(horizon, max_volume);
  for (std::size_t i = 0; i < means.size(); ++i)
    sc.segments.push_back({static_cast<int>(i), 1, horizon, TwoPointParams{1, means[i]}});
  sc.validate();
  return sc;
}

// V = 1 with venue i paying one share with probability means[i].
inline Scenario make_bernoulli_bandit(const std::vector<double>& means, int horizon, std::uint64_t seed) {
  Scenario sc;
  sc.name = "bernoulli_bandit";
  sc.kind = ScenarioKind::kIid;
  sc.dims = {static_cast<int>(means.size()), 1, horizon};
  sc.seed = seed;
  sc.volumes.assign(horizon, 1);
  for (std::size_t i = 0; i < means.size(); ++i)
    sc.segments.push_back({static_cast<int>(i), 1, horizon, TwoPointParams{1, means[i]}});
  sc.validate();
  return sc;
}

}  // namespace darkpool::sim
