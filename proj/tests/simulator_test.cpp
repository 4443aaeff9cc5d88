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

#include <cmath>
#include <numeric>
#include <vector>

#include "darkpool/scenario_io.hpp"
#include "darkpool/simulator.hpp"

namespace darkpool::sim {
namespace {

double column_mean(const LiquidityTrace& tr, int venue, int from, int to) {
  double s = 0.0;
  for (int t = from; t < to; ++t) s += tr.at(t, venue);
  return s / (to - from);
}

TEST(Zbpl, AllZeroWhenP0IsOne) {
  Rng rng(1);
  const ZbplSampler d({1.0, 2.0, 10});
  for (int j = 0; j < 1000; ++j) ASSERT_EQ(d(rng), 0);
}

TEST(Zbpl, LargeExponentConcentratesOnOne) {
  EXPECT_GE(power_law_masses(10.0, 64)[0], 0.99);
}

TEST(Zbpl, EmpiricalMeanMatchesAnalytic) {
  const ZbplParams p{0.4, 1.7, 50};
  const ZbplSampler d(p);
  Rng rng(2);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = d(rng);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, zbpl_mean(p), 3 * std::sqrt(var / n));
}

TEST(Zbpl, PmfAndTailAgree) {
  const ZbplParams p{0.25, 1.4, 12};
  const auto pmf = zbpl_pmf(p);
  EXPECT_NEAR(std::accumulate(pmf.begin(), pmf.end(), 0.0), 1.0, 1e-12);
  const auto tail = zbpl_tail(p, 15);
  for (int u = 1; u <= 15; ++u) {
    double s = 0.0;
    for (int k = u; k <= 12; ++k) s += pmf[k];
    EXPECT_NEAR(tail[u - 1], s, 1e-12);
  }
}

TEST(Zbpl, RejectsInvalidParameters) {
  EXPECT_THROW((ZbplParams{1.2, 2.0, 5}.validate()), std::invalid_argument);
  EXPECT_THROW((ZbplParams{0.5, 1.0, 5}.validate()), std::invalid_argument);
  EXPECT_THROW((ZbplParams{0.5, 2.0, 0}.validate()), std::invalid_argument);
}

TEST(Iid48, ShapeAndReproducibility) {
  const auto sc = make_iid48(3);
  EXPECT_EQ(sc.dims.venues, 48);
  EXPECT_EQ(sc.dims.horizon, 2000);
  EXPECT_TRUE(sc.constant_volume());
  const auto a = draw_liquidities(sc, 99), b = draw_liquidities(make_iid48(3), 99);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, draw_liquidities(sc, 100).values);
  for (const auto& seg : sc.segments) {
    const auto& p = std::get<ZbplParams>(seg.model);
    EXPECT_GE(p.p0, 0.3);
    EXPECT_LE(p.p0, 0.9);
    EXPECT_GE(p.beta, 1.2);
    EXPECT_LE(p.beta, 2.5);
    EXPECT_EQ(p.s_max, 2 * sc.dims.max_volume);
  }
}

TEST(Iid48, ZeroRateMatchesP0) {
  // 48 simultaneous 3-sigma checks: about 0.13 misses expected by chance, so
  // allow two, and bound the sum of squared z-scores (chi-square, 48 dof).
  const auto sc = make_iid48(4);
  const auto tr = draw_liquidities(sc, 5);
  int outside = 0;
  double chi2 = 0.0;
  for (int i = 0; i < 48; ++i) {
    const double p0 = std::get<ZbplParams>(sc.model_at(i, 1)).p0;
    int zeros = 0;
    for (int t = 0; t < 2000; ++t) zeros += tr.at(t, i) == 0.0;
    const double z = (zeros / 2000.0 - p0) / std::sqrt(p0 * (1 - p0) / 2000);
    outside += std::abs(z) > 3.0;
    chi2 += z * z;
  }
  EXPECT_LE(outside, 2);
  EXPECT_LT(chi2, 48 + 5 * std::sqrt(96.0));
}

TEST(TwoVenueSwitch, BoundaryAndMeans) {
  const auto sc = make_two_venue_switch(1);
  EXPECT_EQ(sc.dims.venues, 2);
  EXPECT_EQ(sc.dims.horizon, 25000);
  EXPECT_TRUE(sc.constant_volume());
  EXPECT_EQ(sc.model_at(0, 12500), sc.model_at(1, 12501));
  EXPECT_EQ(sc.model_at(1, 12500), sc.model_at(0, 12501));
  EXPECT_FALSE(sc.model_at(0, 12500) == sc.model_at(0, 12501));
  const double fav = zbpl_mean(std::get<ZbplParams>(sc.model_at(0, 1)));
  const double unfav = zbpl_mean(std::get<ZbplParams>(sc.model_at(1, 1)));
  EXPECT_GT(fav, unfav);
  const auto tr = draw_liquidities(sc, 2);
  EXPECT_GT(column_mean(tr, 0, 0, 12500), column_mean(tr, 1, 0, 12500));
  EXPECT_LT(column_mean(tr, 0, 12500, 25000), column_mean(tr, 1, 12500, 25000));
}

TEST(FiveVenue, VariantsAndPhaseOpposition) {
  for (int vol : {200, 400}) {
    const auto sc = make_five_venue(1, vol);
    EXPECT_EQ(sc.dims.venues, 5);
    EXPECT_EQ(sc.dims.max_volume, vol);
    for (int t = 1; t <= sc.dims.horizon; t += 500) {
      const auto& b1 = std::get<ZbplParams>(sc.model_at(0, t));
      const auto& b5 = std::get<ZbplParams>(sc.model_at(4, t));
      EXPECT_NE(b1.beta, b5.beta);
      EXPECT_EQ(b1.beta + b5.beta, 1.2 + 2.5);
      const double mid = std::get<ZbplParams>(sc.model_at(2, t)).beta;
      EXPECT_TRUE(mid == 1.6 || mid == 2.0);
    }
  }
  FiveVenueConfig cfg;
  cfg.period = 1000;
  cfg.extreme_good = 1.1;
  const auto sc = make_five_venue(1, 200, cfg);
  EXPECT_EQ(sc.notes.at("period"), "1000");
  EXPECT_EQ(std::get<ZbplParams>(sc.model_at(0, 1)).beta, 1.1);
  EXPECT_EQ(std::get<ZbplParams>(sc.model_at(4, 1001)).beta, 1.1);
}

TEST(LowerBound, FavouredVenueRate) {
  const double eps = 0.1;
  const auto sc = make_lower_bound(4, 3, 40000, eps, 7);
  const int fav = std::stoi(sc.notes.at("favored")) - 1;
  const auto tr = draw_liquidities(sc, 8);
  for (int i = 0; i < 4; ++i) {
    int hits = 0;
    for (int t = 0; t < 40000; ++t) {
      ASSERT_TRUE(tr.at(t, i) == 0.0 || tr.at(t, i) == 3.0);
      hits += tr.at(t, i) == 3.0;
    }
    const double p = i == fav ? 0.5 + eps : 0.5;
    EXPECT_NEAR(hits / 40000.0, p, 3 * std::sqrt(p * (1 - p) / 40000)) << "venue " << i;
  }
}

TEST(LowerBound, EpsilonRangeAndDefault) {
  EXPECT_THROW(make_lower_bound(4, 4, 100, 0.5, 1), std::invalid_argument);
  EXPECT_THROW(make_lower_bound(4, 4, 100, -0.1, 1), std::invalid_argument);
  EXPECT_NO_THROW(make_lower_bound(4, 4, 100, 0.0, 1));
  EXPECT_NEAR(default_lower_bound_epsilon(4, 4, 100), 0.25 * std::sqrt(4.0 / 400.0), 1e-15);
}

TEST(ExpertsReduction, AllOnesConsumesEverything) {
  auto env = make_experts_reduction(std::vector<std::vector<double>>(5, std::vector<double>{1.0, 1.0, 1.0}), 4);
  EXPECT_TRUE(env->continuous_only());
  const std::vector<double> a{1.5, 2.0, 0.5};
  for (int t = 0; t < 5; ++t) {
    const auto s = env->liquidity(t, a);
    const auto out = censor_feedback(a, s, env->volume(t));
    EXPECT_DOUBLE_EQ(out.feedback.reward(), 4.0);
    EXPECT_EQ(out.feedback.censor, (std::vector<std::uint8_t>{1, 1, 1}));
  }
}

TEST(ExpertsReduction, UnitVolumeRewardIsExpertMixture) {
  const std::vector<double> rho{0.2, 0.9};
  auto env = make_experts_reduction({rho}, 1);
  const std::vector<double> p{0.3, 0.7};
  const auto out = censor_feedback(p, env->liquidity(0, p), 1);
  EXPECT_NEAR(out.feedback.reward(), 0.2 * 0.3 + 0.9 * 0.7, 1e-15);
}

TEST(ExpertsReduction, RejectsBadInput) {
  EXPECT_THROW(make_experts_reduction({{0.5, 1.5}}, 2), std::invalid_argument);
  EXPECT_THROW(make_experts_reduction({{0.5, 0.5}, {0.5}}, 2), std::invalid_argument);
  auto env = make_experts_reduction({{0.5, 0.5}}, 2);
  EXPECT_THROW(env->liquidity(0, std::vector<double>{1, 1, 0}), std::invalid_argument);
}

TEST(Scenario, ValidationCatchesGapsAndOverlaps) {
  auto sc = make_two_venue_switch(1, {100, 50, 5, {0.3, 1.2, 10}, {0.9, 2.5, 10}});
  auto gap = sc;
  gap.segments.pop_back();
  EXPECT_THROW(gap.validate(), std::invalid_argument);
  auto overlap = sc;
  overlap.segments.push_back(sc.segments.front());
  EXPECT_THROW(overlap.validate(), std::invalid_argument);
  auto vol = sc;
  vol.volumes[3] = 6;
  EXPECT_THROW(vol.validate(), std::invalid_argument);
}

TEST(Scenario, WithinSegmentDrawsAreExchangeable) {
  // Means of the two halves of a stationary segment agree; the halves
  // straddling the switch do not.
  const auto sc = make_two_venue_switch(2);
  const auto tr = draw_liquidities(sc, 3);
  for (int venue = 0; venue < 2; ++venue) {
    double s = 0, s2 = 0;
    for (int t = 0; t < 12500; ++t) {
      s += tr.at(t, venue);
      s2 += tr.at(t, venue) * tr.at(t, venue);
    }
    const double var = s2 / 12500 - (s / 12500) * (s / 12500);
    const double diff = column_mean(tr, venue, 0, 6250) - column_mean(tr, venue, 6250, 12500);
    EXPECT_LT(std::abs(diff), 4 * std::sqrt(2 * var / 6250));
  }
}

TEST(ScenarioIo, RoundTripsBuiltins) {
  for (const auto& b : builtin_scenarios()) {
    const auto sc = b.make();
    const auto text = serialize(sc);
    const auto back = parse_scenario(text);
    EXPECT_EQ(serialize(back), text) << b.name;
    EXPECT_EQ(draw_liquidities(back, 1).values, draw_liquidities(sc, 1).values) << b.name;
  }
}

TEST(ScenarioIo, VaryingVolumesRoundTrip) {
  auto sc = make_iid48(1, {4, 30, 5});
  for (int t = 0; t < 30; ++t) sc.volumes[t] = 1 + t % 5;
  const auto back = parse_scenario(serialize(sc));
  EXPECT_EQ(back.volumes, sc.volumes);
}

TEST(ScenarioIo, ParsesHandWrittenFile) {
  const auto sc = parse_scenario(R"(# demo
name = demo
kind = switching
venues = 2
max_volume = 3
horizon = 4
seed = 9
volume = 3

[segment]
venue = 1
start = 1
end = 4
model = zbpl
p0 = 0.5
beta = 1.5
s_max = 6

[segment]
venue = 2
start = 1
end = 4
model = two_point   # trailing comment
level = 2
prob = 0.25

[notes]
origin = test
)");
  EXPECT_EQ(sc.name, "demo");
  EXPECT_EQ(sc.kind, ScenarioKind::kSwitching);
  EXPECT_EQ(sc.seed, 9u);
  EXPECT_EQ(sc.notes.at("origin"), "test");
  EXPECT_EQ(std::get<TwoPointParams>(sc.model_at(1, 2)).level, 2);
}

TEST(ScenarioIo, ReportsErrorsWithLineNumbers) {
  const std::string base = "venues = 2\nmax_volume = 1\nhorizon = 2\nvolume = 1\n";
  const std::string seg = "[segment]\nvenue = 1\nstart = 1\nend = 2\nmodel = two_point\nlevel = 1\nprob = 0.5\n"
                          "[segment]\nvenue = 2\nstart = 1\nend = 2\nmodel = two_point\nlevel = 1\nprob = 0.5\n";
  EXPECT_NO_THROW(parse_scenario(base + seg));
  try {
    parse_scenario("venues = two\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
  }
  EXPECT_THROW(parse_scenario(base + "colour = red\n" + seg), ParseError);
  EXPECT_THROW(parse_scenario(base + "[bogus]\n" + seg), ParseError);
  EXPECT_THROW(parse_scenario(base + seg + "[segment]\nvenue = 1\n"), ParseError);
  EXPECT_THROW(parse_scenario(base), ParseError);  // uncovered venues
  EXPECT_THROW(parse_scenario("venues = 2\nmax_volume = 1\nhorizon = 2\n" + seg), ParseError);  // no volumes
}

TEST(Builtins, AllResolve) {
  for (const auto& b : builtin_scenarios()) {
    EXPECT_NO_THROW(resolve_scenario(b.name));
    EXPECT_NO_THROW(resolve_scenario("builtin:" + b.name));
  }
  EXPECT_THROW(resolve_scenario("builtin:nope"), std::invalid_argument);
  EXPECT_THROW(resolve_scenario("/nonexistent/file.cfg"), std::runtime_error);
}

}  // namespace
}  // namespace darkpool::sim
