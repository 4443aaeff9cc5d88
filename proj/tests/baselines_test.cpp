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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "darkpool/baselines.hpp"

namespace darkpool::baselines {
namespace {

TEST(KmTail, ExactSamples) {
  const std::vector<CensoredSample> h{{5, 0}, {5, 2}, {5, 2}};
  const auto t = km_update(h, 4);
  EXPECT_NEAR(t.at(1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.at(2), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(t.at(3), 0.0);
  EXPECT_EQ(t.at(4), 0.0);
}

TEST(KmTail, EmptyHistoryIsOptimistic) {
  const auto t = km_update({}, 5);
  for (int u = 1; u <= 5; ++u) EXPECT_EQ(t.at(u), 1.0);
}

TEST(KmTail, CensoredOnlyStaysOptimistic) {
  const std::vector<CensoredSample> h{{1, 1}, {1, 1}, {1, 1}};
  const auto t = km_update(h, 6);
  for (int u = 1; u <= 6; ++u) EXPECT_EQ(t.at(u), 1.0);
}

TEST(KmTail, ProductLimitWithCensoring) {
  // s exactly 1; s >= 2 (censored); s exactly 3.
  const std::vector<CensoredSample> h{{4, 1}, {2, 2}, {5, 3}};
  const auto t = km_update(h, 5);
  EXPECT_NEAR(t.at(1), 1.0, 1e-15);
  EXPECT_NEAR(t.at(2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.at(3), 2.0 / 3.0, 1e-15);
  // At level 3 only the exact sample is at risk.
  EXPECT_NEAR(t.at(4), 0.0, 1e-15);
}

TEST(KmTail, UncensoredEqualsEmpiricalSurvival) {
  Rng rng(1);
  std::vector<CensoredSample> h;
  std::vector<int> s;
  for (int j = 0; j < 500; ++j) {
    s.push_back(static_cast<int>(rng.uniform_int(9)));
    h.push_back({100, s.back()});
  }
  const auto t = km_update(h, 12);
  for (int u = 1; u <= 12; ++u) {
    const double emp = std::count_if(s.begin(), s.end(), [&](int x) { return x >= u; }) / 500.0;
    EXPECT_NEAR(t.at(u), emp, 1e-12);
  }
}

TEST(KmTail, MonotoneOnRandomCensoredHistories) {
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<CensoredSample> h;
    for (int j = 0; j < 30; ++j) {
      const std::int64_t a = static_cast<std::int64_t>(rng.uniform_int(6));
      const std::int64_t s = static_cast<std::int64_t>(rng.uniform_int(8));
      h.push_back({a, std::min(a, s)});
    }
    const auto t = km_update(h, 10);
    for (int u = 1; u <= 10; ++u) {
      ASSERT_GE(t.at(u), 0.0);
      ASSERT_LE(t.at(u), 1.0);
      ASSERT_LE(t.at(u), t.at(u - 1));
    }
  }
}

TEST(CensoredSample, RejectsOverConsumption) {
  CensoredCounts c;
  EXPECT_THROW(c.add(CensoredSample{2, 3}), std::invalid_argument);
  c.add(CensoredSample{0, 0});
  EXPECT_EQ(c.informative(), 0);
}

TEST(GreedyAllocate, Examples) {
  std::vector<TailEstimate> one{{{1, 1, 1}}, {{0, 0, 0}}};
  EXPECT_EQ(greedy_allocate(one, 3).alloc, (std::vector<std::int64_t>{3, 0}));

  std::vector<TailEstimate> same{{{0.9, 0.6, 0.3, 0.1}}, {{0.9, 0.6, 0.3, 0.1}}, {{0.9, 0.6, 0.3, 0.1}}};
  EXPECT_EQ(greedy_allocate(same, 4).alloc, (std::vector<std::int64_t>{2, 1, 1}));

  std::vector<TailEstimate> mixed{{{1.0, 0.2, 0.1}}, {{0.9, 0.8, 0.1}}};
  EXPECT_EQ(greedy_allocate(mixed, 3).alloc, (std::vector<std::int64_t>{1, 2}));
}

TEST(GreedyAllocate, MatchesBruteForce) {
  Rng rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const int k = 2 + static_cast<int>(rng.uniform_int(2));
    const int vol = 1 + static_cast<int>(rng.uniform_int(5));
    std::vector<TailEstimate> tails(k);
    for (auto& t : tails) {
      double s = 1.0;
      for (int u = 0; u < vol; ++u) t.survival.push_back(s *= rng.uniform());
    }
    auto value = [&](const std::vector<std::int64_t>& a) {
      double v = 0.0;
      for (int i = 0; i < k; ++i)
        for (int u = 1; u <= a[i]; ++u) v += tails[i].at(u);
      return v;
    };
    double best = -1.0;
    std::vector<std::int64_t> a(k, 0);
    for (;;) {
      if (std::accumulate(a.begin(), a.end(), std::int64_t{0}) == vol) best = std::max(best, value(a));
      int pos = 0;
      while (pos < k && ++a[pos] > vol) a[pos++] = 0;
      if (pos == k) break;
    }
    const auto g = greedy_allocate(tails, vol);
    EXPECT_EQ(std::accumulate(g.alloc.begin(), g.alloc.end(), std::int64_t{0}), vol);
    EXPECT_NEAR(value(g.alloc), best, 1e-12);
  }
}

TEST(ParmlFit, AllZeros) {
  const std::vector<CensoredSample> h{{3, 0}, {1, 0}, {5, 0}};
  const auto p = parml_fit(h, 10);
  EXPECT_EQ(p.p0, 1.0);
  EXPECT_EQ(p.beta, kDefaultBeta);
}

TEST(ParmlFit, EmptyHistoryGivesPrior) {
  const auto p = parml_fit(std::vector<CensoredSample>{}, 10);
  EXPECT_EQ(p.p0, 0.0);
  EXPECT_EQ(p.beta, kDefaultBeta);
}

TEST(ParmlFit, RecoversGeneratingParameters) {
  const ZbplParams truth{0.3, 1.5, 64};
  const ZbplSampler draw(truth);
  Rng rng(4);
  CensoredCounts c;
  for (int j = 0; j < 10000; ++j) c.add(CensoredSample{1000, draw(rng)});
  const auto p = parml_fit(c, 64);
  EXPECT_NEAR(p.p0, 0.3, 0.02);
  EXPECT_NEAR(p.beta, 1.5, 0.1);
}

TEST(ParmlFit, RecoversUnderCensoring) {
  const ZbplParams truth{0.5, 2.0, 40};
  const ZbplSampler draw(truth);
  Rng rng(5);
  CensoredCounts c;
  for (int j = 0; j < 20000; ++j) {
    const std::int64_t a = 1 + static_cast<std::int64_t>(rng.uniform_int(6));
    c.add(a, std::min<double>(a, draw(rng)));
  }
  const auto p = parml_fit(c, 40);
  EXPECT_NEAR(p.p0, 0.5, 0.02);
  EXPECT_NEAR(p.beta, 2.0, 0.1);
}

TEST(ParmlFit, CensoredSamplePrefersHeavierTail) {
  const auto exact = parml_fit(std::vector<CensoredSample>{{6, 5}}, 50);
  const auto cens = parml_fit(std::vector<CensoredSample>{{5, 5}}, 50);
  EXPECT_LT(cens.beta, exact.beta);
}

TEST(ParmlAllocate, Examples) {
  const std::vector<ZbplParams> same(3, ZbplParams{0.4, 1.8, 20});
  const auto a = parml_allocate(same, 7);
  EXPECT_LE(*std::max_element(a.alloc.begin(), a.alloc.end()) - *std::min_element(a.alloc.begin(), a.alloc.end()), 1);

  const std::vector<ZbplParams> dead{{1.0, 2.0, 20}, {0.9, 2.5, 20}};
  EXPECT_EQ(parml_allocate(dead, 5).alloc, (std::vector<std::int64_t>{0, 5}));

  const std::vector<ZbplParams> ps{{0.2, 1.3, 30}, {0.6, 2.2, 30}, {0.5, 1.6, 30}};
  std::vector<TailEstimate> tails;
  for (const auto& p : ps) tails.push_back({zbpl_tail(p, 12)});
  EXPECT_EQ(parml_allocate(ps, 12).alloc, greedy_allocate(tails, 12).alloc);
}

TEST(OnlineAllocators, UseOnlyObservations) {
  OptKmAllocator km(2);
  ParMlAllocator ml(2, 20, 0.0);
  Rng rng(6);
  const ZbplSampler good({0.2, 1.3, 20}), bad({0.9, 2.5, 20});
  for (int t = 0; t < 300; ++t) {
    const std::vector<double> s{static_cast<double>(good(rng)), static_cast<double>(bad(rng))};
    const auto a = km.allocate(5), b = ml.allocate(5);
    ASSERT_EQ(a.alloc[0] + a.alloc[1], 5);
    ASSERT_EQ(b.alloc[0] + b.alloc[1], 5);
    km.observe(censor_feedback(a, s).feedback);
    ml.observe(censor_feedback(b, s).feedback);
  }
  EXPECT_GT(ml.params(1).p0, ml.params(0).p0);
  EXPECT_GE(km.allocate(5).alloc[0], 3);
  EXPECT_GE(ml.allocate(5).alloc[0], 3);
}

TEST(OnlineAllocators, ParmlRefitScheduleMatchesFullRefitEarly) {
  ParMlAllocator lazy(2, 30), eager(2, 30, 0.0);
  Rng rng(7);
  const ZbplSampler d({0.3, 1.6, 30});
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> s{static_cast<double>(d(rng)), static_cast<double>(d(rng))};
    const IntegralAllocation a{{4, 4}, 8};
    const auto out = censor_feedback(a, s);
    lazy.observe(out.feedback);
    eager.observe(out.feedback);
  }
  EXPECT_EQ(lazy.params(0), eager.params(0));
  EXPECT_EQ(lazy.params(1), eager.params(1));
}

}  // namespace
TEST(ParMlAllocator, StartsOptimisticAndKeepsProbingZeroVenues) {
  ParMlAllocator ml(2, 10);
  EXPECT_EQ(ml.params(0).p0, 0.0);
  EXPECT_NEAR(ml.params(0).beta, kBetaLow, 1e-3);
  // Venue 0 reports one zero, venue 1 absorbs its single unit.
  ml.observe(censor_feedback(IntegralAllocation{{1, 1}, 2}, std::vector<double>{0, 3}).feedback);
  EXPECT_DOUBLE_EQ(ml.params(0).p0, 0.5);
  EXPECT_EQ(ml.params(1).p0, 0.0);
  EXPECT_GT(ml.allocate(4).alloc[0], 0);
}

TEST(OptKmAllocator, CachedTailsMatchFreshEstimates) {
  OptKmAllocator km(3);
  Rng rng(8);
  const ZbplSampler d({0.4, 1.5, 12});
  for (int t = 0; t < 200; ++t) {
    const int volume = 1 + static_cast<int>(rng.uniform_int(8));
    const auto a = km.allocate(volume);
    std::vector<TailEstimate> fresh;
    for (int i = 0; i < 3; ++i) fresh.push_back(km_tail(km.counts(i), volume));
    ASSERT_EQ(a.alloc, greedy_allocate(fresh, volume).alloc) << "round " << t;
    const std::vector<double> s{static_cast<double>(d(rng)), static_cast<double>(d(rng)), static_cast<double>(d(rng))};
    km.observe(censor_feedback(a, s).feedback);
  }
}

TEST(PowerLawLikelihood, MatchesDirectFormula) {
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const int s_max = 2 + static_cast<int>(rng.uniform_int(60));
    CensoredCounts c;
    for (int n = 0; n < 40; ++n) {
      const auto allocated = 1 + static_cast<std::int64_t>(rng.uniform_int(s_max + 5));
      const auto consumed = static_cast<std::int64_t>(rng.uniform_int(allocated + 1));
      c.add(CensoredSample{allocated, consumed});
    }
    const double beta = 1.01 + 4.0 * rng.uniform();
    double z = 0.0;
    for (int k = 1; k <= s_max; ++k) z += std::pow(k, -beta);
    auto tail = [&](int from) {
      double t = 0.0;
      for (int k = std::min(from, s_max); k <= s_max; ++k) t += std::pow(k, -beta);
      return t;
    };
    double direct = 0.0;
    for (std::size_t k = 1; k < c.exact_levels(); ++k)
      direct += c.exact_at(k) * std::log(std::pow(std::min<double>(k, s_max), -beta) / z);
    for (std::size_t k = 1; k < c.censored_levels(); ++k) direct += c.censored_at(k) * std::log(tail(k) / z);
    EXPECT_NEAR(power_law_loglik(c, beta, s_max), direct, 1e-9 * (1.0 + std::abs(direct)));
  }
}

}  // namespace darkpool::baselines
