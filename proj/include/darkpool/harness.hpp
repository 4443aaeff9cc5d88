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

// Multi-trial experiment runner. Allocators only ever receive the censored
// Observation of each round; liquidities stay on the harness side, where
// they feed the hindsight comparator.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "darkpool/baselines.hpp"
#include "darkpool/comparator.hpp"
#include "darkpool/core.hpp"
#include "darkpool/exp3int.hpp"
#include "darkpool/expgrad.hpp"
#include "darkpool/simulator.hpp"

namespace darkpool::harness {

enum class AlgorithmId { kExpGrad, kExp3Int, kExp3IntHp, kOptKm, kParMl, kUniform };

inline constexpr AlgorithmId kAllAlgorithms[] = {AlgorithmId::kExpGrad, AlgorithmId::kExp3Int,
                                                 AlgorithmId::kExp3IntHp, AlgorithmId::kOptKm,
                                                 AlgorithmId::kParMl, AlgorithmId::kUniform};

inline const char* to_string(AlgorithmId a) {
  switch (a) {
    case AlgorithmId::kExpGrad: return "expgrad";
    case AlgorithmId::kExp3Int: return "exp3int";
    case AlgorithmId::kExp3IntHp: return "exp3int_hp";
    case AlgorithmId::kOptKm: return "optkm";
    case AlgorithmId::kParMl: return "parml";
    case AlgorithmId::kUniform: return "uniform";
  }
  return "?";
}

inline AlgorithmId parse_algorithm(const std::string& s) {
  for (AlgorithmId a : kAllAlgorithms)
    if (s == to_string(a)) return a;
  throw std::invalid_argument("unknown algorithm id: " + s);
}

// Plays whole shares.
inline bool integral(AlgorithmId a) {
  return a == AlgorithmId::kExp3Int || a == AlgorithmId::kExp3IntHp || a == AlgorithmId::kOptKm ||
         a == AlgorithmId::kParMl;
}

// Optional overrides of the default parameters.
struct AlgorithmConfig {
  std::optional<double> eta;
  std::optional<double> gamma;
  std::optional<int> parml_s_max;  // defaults to 2 V
  double parml_refit_growth = 0.1;
};

// ---------------------------------------------------------------------------
// Allocators
// ---------------------------------------------------------------------------

class Allocator {
 public:
  virtual ~Allocator() = default;
  virtual std::vector<double> allocate(int volume) = 0;
  virtual void observe(const Observation& obs) = 0;
};

class ExpGradAllocator final : public Allocator {
 public:
  ExpGradAllocator(const ProblemDims& dims, double eta) : state_(expgrad::init(dims, eta)) {}
  std::vector<double> allocate(int volume) override { return expgrad::allocate(state_, volume).alloc; }
  void observe(const Observation& obs) override { state_ = expgrad::update(std::move(state_), obs); }
  const expgrad::EgState& state() const { return state_; }

 private:
  expgrad::EgState state_;
};

class Exp3IntAllocator final : public Allocator {
 public:
  Exp3IntAllocator(const ProblemDims& dims, const exp3int::Exp3Parameters& params, Rng rng)
      : state_(exp3int::init(dims, params)), rng_(std::move(rng)) {}
  std::vector<double> allocate(int volume) override {
    plan_ = exp3int::plan_round(state_, volume);
    return exp3int::draw(plan_, rng_).as_real();
  }
  void observe(const Observation& obs) override { state_ = exp3int::update(std::move(state_), plan_, obs); }
  const exp3int::Exp3State& state() const { return state_; }

 private:
  exp3int::Exp3State state_;
  exp3int::RoundingPlan plan_;
  Rng rng_;
};

class OptKmAdapter final : public Allocator {
 public:
  explicit OptKmAdapter(int venues) : impl_(venues) {}
  std::vector<double> allocate(int volume) override { return impl_.allocate(volume).as_real(); }
  void observe(const Observation& obs) override { impl_.observe(obs); }

 private:
  baselines::OptKmAllocator impl_;
};

class ParMlAdapter final : public Allocator {
 public:
  ParMlAdapter(int venues, int s_max, double growth) : impl_(venues, s_max, growth) {}
  std::vector<double> allocate(int volume) override { return impl_.allocate(volume).as_real(); }
  void observe(const Observation& obs) override { impl_.observe(obs); }

 private:
  baselines::ParMlAllocator impl_;
};

// V^t / K on every venue.
class UniformAllocator final : public Allocator {
 public:
  explicit UniformAllocator(int venues) : venues_(venues) {}
  std::vector<double> allocate(int volume) override {
    return std::vector<double>(venues_, static_cast<double>(volume) / venues_);
  }
  void observe(const Observation&) override {}

 private:
  int venues_;
};

inline exp3int::Exp3Parameters exp3_parameters(AlgorithmId a, const ProblemDims& dims, const AlgorithmConfig& cfg) {
  auto p = exp3int::default_parameters(dims, a == AlgorithmId::kExp3IntHp);
  if (cfg.gamma) {
    p.gamma = *cfg.gamma;
    p.eta = exp3int::clamped_eta(dims, p.gamma, p.variance_corrected, p.delta);
  }
  if (cfg.eta) p.eta = *cfg.eta;
  return p;
}

inline std::unique_ptr<Allocator> make_allocator(AlgorithmId a, const ProblemDims& dims, Rng rng,
                                                 const AlgorithmConfig& cfg = {}) {
  switch (a) {
    case AlgorithmId::kExpGrad:
      return std::make_unique<ExpGradAllocator>(dims, cfg.eta.value_or(expgrad::default_eta(dims)));
    case AlgorithmId::kExp3Int:
    case AlgorithmId::kExp3IntHp:
      return std::make_unique<Exp3IntAllocator>(dims, exp3_parameters(a, dims, cfg), std::move(rng));
    case AlgorithmId::kOptKm: return std::make_unique<OptKmAdapter>(dims.venues);
    case AlgorithmId::kParMl:
      return std::make_unique<ParMlAdapter>(dims.venues, cfg.parml_s_max.value_or(2 * dims.max_volume),
                                            cfg.parml_refit_growth);
    case AlgorithmId::kUniform: return std::make_unique<UniformAllocator>(dims.venues);
  }
  throw std::invalid_argument("make_allocator: unknown algorithm");
}

// ---------------------------------------------------------------------------
// One trial
// ---------------------------------------------------------------------------

struct TrialRun {
  std::vector<double> cum_reward;  // per round
  std::vector<double> allocation;  // T x K, row-major
};

// Plays `alloc` against `env` for its whole horizon.
inline TrialRun play(Allocator& alloc, sim::Environment& env) {
  const int horizon = env.horizon(), k = env.venues();
  TrialRun run;
  run.cum_reward.resize(horizon);
  run.allocation.resize(static_cast<std::size_t>(horizon) * k);
  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    const int volume = env.volume(t);
    const std::vector<double> a = alloc.allocate(volume);
    if (static_cast<int>(a.size()) != k) throw std::logic_error("allocator returned the wrong number of venues");
    double sum = 0.0;
    for (double x : a) {
      if (x < 0.0) throw std::logic_error("allocator returned a negative allocation");
      sum += x;
    }
    if (std::abs(sum - volume) > 1e-7) throw std::logic_error("allocator did not allocate the round volume");
    const auto liquidity = env.liquidity(t, a);
    const RoundOutcome outcome = censor_feedback(a, liquidity, volume);
    alloc.observe(outcome.feedback);
    total += outcome.feedback.reward();
    run.cum_reward[t] = total;
    std::copy(a.begin(), a.end(), run.allocation.begin() + static_cast<std::ptrdiff_t>(t) * k);
  }
  return run;
}

// Cumulative reward of the best fixed assignment, round by round.
inline std::vector<double> comparator_prefix(const sim::Scenario& sc, const sim::LiquidityTrace& trace) {
  if (sc.kind == sim::ScenarioKind::kExpertsReduction) {
    // Reward of a fixed u is sum_i rho_i u_i: best is everything on the best expert.
    int best = 0;
    std::vector<double> col(trace.venues, 0.0);
    for (int t = 0; t < trace.horizon; ++t)
      for (int i = 0; i < trace.venues; ++i) col[i] += trace.at(t, i);
    for (int i = 1; i < trace.venues; ++i)
      if (col[i] > col[best]) best = i;
    std::vector<double> out(trace.horizon);
    double total = 0.0;
    for (int t = 0; t < trace.horizon; ++t) out[t] = total += sc.volumes[t] * trace.at(t, best);
    return out;
  }
  const auto opt = comparator::hindsight(trace, sc.volumes, sc.dims.max_volume);
  return comparator::prefix_values(opt.assignment, trace, sc.volumes);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

// Running mean and sum of squared deviations per round.
struct Welford {
  std::int64_t n = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  void add(const std::vector<double>& x) {
    if (mean.empty()) {
      mean.assign(x.size(), 0.0);
      m2.assign(x.size(), 0.0);
    }
    ++n;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - mean[j];
      mean[j] += d / static_cast<double>(n);
      m2[j] += d * (x[j] - mean[j]);
    }
  }

  std::vector<double> stderr_of_mean() const {
    std::vector<double> se(mean.size(), 0.0);
    if (n < 2) return se;
    for (std::size_t j = 0; j < se.size(); ++j)
      se[j] = std::sqrt(std::max(0.0, m2[j] / static_cast<double>(n - 1)) / static_cast<double>(n));
    return se;
  }
};

struct Series {
  AlgorithmId algorithm = AlgorithmId::kExpGrad;
  std::vector<double> mean_cum_reward;
  std::vector<double> stderr_cum_reward;
  std::vector<double> mean_allocation;             // T x K
  std::vector<std::vector<double>> trial_cum;      // raw, trials x T (kept when requested)
  std::vector<double> mean_regret;                 // mean comparator prefix - mean reward

  double final_reward() const { return mean_cum_reward.back(); }
  double allocation_at(int t, int venue, int venues) const {
    return mean_allocation[static_cast<std::size_t>(t) * venues + venue];
  }
};

struct Trace {
  std::string scenario;
  ProblemDims dims;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<Series> series;
  std::vector<double> mean_comparator;             // per round
  std::vector<std::vector<double>> trial_comparator;  // raw, trials x T (kept when requested)

  const Series& get(AlgorithmId a) const {
    for (const auto& s : series)
      if (s.algorithm == a) return s;
    throw std::out_of_range(std::string("trace has no series for ") + to_string(a));
  }
};

struct RunOptions {
  int trials = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  bool keep_raw = true;
  AlgorithmConfig config;
};

// Master seeds of the reference runs.
inline constexpr std::uint64_t kDefaultSeeds[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

// Seed of trial `trial`: a counter-based derivation from the scenario and
// master seeds, shared by every algorithm so they face the same liquidities.
inline std::uint64_t trial_seed(std::uint64_t scenario_seed, std::uint64_t master_seed, int trial) {
  return derive_seed(derive_seed(scenario_seed, master_seed), static_cast<std::uint64_t>(trial));
}

// Liquidity draws of the trial with seed `seed`.
inline sim::LiquidityTrace trial_trace(const sim::Scenario& sc, std::uint64_t seed) {
  return sim::draw_liquidities(sc, derive_seed(seed, static_cast<std::uint64_t>(Stream::kEnvironment)));
}

struct TrialResult {
  std::vector<double> comparator;
  std::vector<TrialRun> runs;  // one per algorithm
};

inline TrialResult run_trial(std::span<const AlgorithmId> algorithms, const sim::Scenario& sc, std::uint64_t seed,
                             const AlgorithmConfig& cfg) {
  const Rng root(seed);
  const auto trace = trial_trace(sc, seed);
  TrialResult out;
  out.comparator = comparator_prefix(sc, trace);
  for (std::size_t j = 0; j < algorithms.size(); ++j) {
    std::unique_ptr<sim::Environment> env;
    if (sc.kind == sim::ScenarioKind::kExpertsReduction)
      env = sim::make_experts_reduction(trace, sc.dims.max_volume);
    else
      env = std::make_unique<sim::ObliviousEnvironment>(sc.volumes, trace);
    auto alloc = make_allocator(algorithms[j], sc.dims, split(root, Stream::kAlgorithm).split(j), cfg);
    out.runs.push_back(play(*alloc, *env));
  }
  return out;
}

inline Trace run_experiment(std::span<const AlgorithmId> algorithms, const sim::Scenario& sc,
                            const RunOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
  if (algorithms.empty()) throw std::invalid_argument("run_experiment: no algorithms");
  sc.validate();
  if (sc.kind == sim::ScenarioKind::kExpertsReduction)
    for (AlgorithmId a : algorithms)
      if (integral(a))
        throw std::invalid_argument(std::string("scenario is continuous-only; ") + to_string(a) +
                                    " plays integral allocations");

  const int k = sc.dims.venues, horizon = sc.dims.horizon;
  const std::size_t na = algorithms.size();
  std::vector<Welford> reward(na);
  std::vector<std::vector<double>> alloc_sum(na, std::vector<double>(static_cast<std::size_t>(horizon) * k, 0.0));
  std::vector<double> comp_sum(horizon, 0.0);

  Trace tr;
  tr.scenario = sc.name;
  tr.dims = sc.dims;
  tr.trials = opt.trials;
  tr.seed = opt.seed;
  tr.series.resize(na);

  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, opt.trials);

  // Batches of `threads` trials run concurrently and are then reduced in
  // trial order, so results do not depend on scheduling.
  for (int base = 0; base < opt.trials; base += threads) {
    const int batch = std::min(threads, opt.trials - base);
    std::vector<TrialResult> results(batch);
    std::vector<std::exception_ptr> errors(batch);
    auto work = [&](int j) {
      try {
        results[j] = run_trial(algorithms, sc, trial_seed(sc.seed, opt.seed, base + j), opt.config);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    };
    if (batch == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int j = 0; j < batch; ++j) pool.emplace_back(work, j);
      for (auto& th : pool) th.join();
    }
    for (int j = 0; j < batch; ++j) {
      if (errors[j]) std::rethrow_exception(errors[j]);
      auto& r = results[j];
      for (int t = 0; t < horizon; ++t) comp_sum[t] += r.comparator[t];
      if (opt.keep_raw) tr.trial_comparator.push_back(std::move(r.comparator));
      for (std::size_t a = 0; a < na; ++a) {
        reward[a].add(r.runs[a].cum_reward);
        for (std::size_t x = 0; x < alloc_sum[a].size(); ++x) alloc_sum[a][x] += r.runs[a].allocation[x];
        if (opt.keep_raw) tr.series[a].trial_cum.push_back(std::move(r.runs[a].cum_reward));
      }
    }
  }

  const double n = opt.trials;
  tr.mean_comparator.resize(horizon);
  for (int t = 0; t < horizon; ++t) tr.mean_comparator[t] = comp_sum[t] / n;
  for (std::size_t a = 0; a < na; ++a) {
    auto& s = tr.series[a];
    s.algorithm = algorithms[a];
    s.mean_cum_reward = reward[a].mean;
    s.stderr_cum_reward = reward[a].stderr_of_mean();
    s.mean_allocation = std::move(alloc_sum[a]);
    for (double& x : s.mean_allocation) x /= n;
    s.mean_regret.resize(horizon);
    for (int t = 0; t < horizon; ++t) s.mean_regret[t] = tr.mean_comparator[t] - s.mean_cum_reward[t];
  }
  return tr;
}

inline Trace run_experiment(AlgorithmId algorithm, const sim::Scenario& sc, const RunOptions& opt) {
  const AlgorithmId one[] = {algorithm};
  return run_experiment(one, sc, opt);
}

}  // namespace darkpool::harness
