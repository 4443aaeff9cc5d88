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
#include <numbers>
#include <vector>

#include "darkpool/comparator.hpp"
#include "darkpool/expgrad.hpp"

namespace darkpool {
namespace {

TEST(ExpGradInit, UniformRows) {
  const auto s = expgrad::init({4, 2, 10}, 0.5);
  for (int v = 0; v < 2; ++v)
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(s.weights.prob(v, i), 0.25);
  const auto s2 = expgrad::init({2, 3, 10}, 0.5);
  EXPECT_EQ(s2.weights.units(), 3);
  for (int v = 0; v < 3; ++v) EXPECT_DOUBLE_EQ(s2.weights.prob(v, 1), 0.5);
}

TEST(ExpGradInit, RejectsEtaOutOfRange) {
  EXPECT_THROW(expgrad::init({2, 1, 10}, 1.5), std::invalid_argument);
  EXPECT_THROW(expgrad::init({2, 1, 10}, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(expgrad::init({2, 1, 10}, 1.0));
}

TEST(ExpGradDefaultEta, Values) {
  EXPECT_NEAR(expgrad::default_eta({2, 1, 100}), 0.09824, 1e-5);
  EXPECT_DOUBLE_EQ(expgrad::default_eta({3, 1, 1}), 1.0);
  const double a = expgrad::default_eta({5, 1, 1000}), b = expgrad::default_eta({5, 1, 4000});
  EXPECT_NEAR(b, a / 2, 1e-15);
}

TEST(ExpGradAllocate, Examples) {
  const auto s = expgrad::init({2, 3, 10}, 0.5);
  EXPECT_EQ(expgrad::allocate(s, 3).alloc, (std::vector<double>{1.5, 1.5}));

  const auto delta = WeightMatrix::from_rows({{1, 1e-300}, {1e-300, 1}});
  const auto a = expgrad::allocate(delta, 2).alloc;
  EXPECT_NEAR(a[0], 1.0, 1e-12);
  EXPECT_NEAR(a[1], 1.0, 1e-12);

  const auto w = WeightMatrix::from_rows({{0.2, 0.3, 0.5}, {0.6, 0.2, 0.2}});
  const auto first = expgrad::allocate(w, 1).alloc;
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(first[i], w.prob(0, i));
}

TEST(ExpGradAllocate, VolumeBounds) {
  const auto s = expgrad::init({2, 3, 10}, 0.5);
  EXPECT_THROW(expgrad::allocate(s, 4), std::out_of_range);
  EXPECT_THROW(expgrad::allocate(s, -1), std::out_of_range);
  EXPECT_EQ(expgrad::allocate(s, 0).alloc, (std::vector<double>{0, 0}));
}

TEST(ExpGradUpdate, EqualBitsLeaveWeightsUnchanged) {
  auto s = expgrad::init({3, 2, 10}, 0.7);
  s.weights = WeightMatrix::from_rows({{0.2, 0.3, 0.5}, {0.6, 0.2, 0.2}});
  const auto before = s.weights;
  s = expgrad::update(std::move(s), std::vector<std::uint8_t>{1, 1, 1}, 2);
  for (int v = 0; v < 2; ++v)
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.weights.prob(v, i), before.prob(v, i), 1e-15);
}

TEST(ExpGradUpdate, LogTwoStep) {
  auto s = expgrad::init({2, 1, 10}, std::numbers::ln2);
  s = expgrad::update(std::move(s), std::vector<std::uint8_t>{1, 0}, 1);
  EXPECT_NEAR(s.weights.prob(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.weights.prob(0, 1), 1.0 / 3.0, 1e-15);
}

TEST(ExpGradUpdate, RowsAboveVolumeUntouched) {
  auto s = expgrad::init({3, 4, 10}, 0.3);
  s = expgrad::update(std::move(s), std::vector<std::uint8_t>{1, 0, 1}, 4);
  const auto before = s.weights;
  s = expgrad::update(std::move(s), std::vector<std::uint8_t>{0, 1, 0}, 2);
  for (int v = 2; v < 4; ++v)
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(s.weights.prob(v, i), before.prob(v, i));
      EXPECT_EQ(s.weights.log_prob(v, i), before.log_prob(v, i));
    }
  // Volume 0 is a no-op.
  const auto snap = s.weights;
  s = expgrad::update(std::move(s), std::vector<std::uint8_t>{0, 1, 0}, 0);
  for (int v = 0; v < 4; ++v)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(s.weights.prob(v, i), snap.prob(v, i));
}

TEST(ExpGrad, PermutationEquivariance) {
  const ProblemDims dims{4, 3, 200};
  const std::vector<int> perm{2, 0, 3, 1};
  auto a = expgrad::init(dims, 0.2), b = expgrad::init(dims, 0.2);
  Rng rng(11);
  for (int t = 0; t < dims.horizon; ++t) {
    const int vol = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<double> s(4);
    for (double& x : s) x = static_cast<double>(rng.uniform_int(3));
    std::vector<double> sp(4);
    for (int i = 0; i < 4; ++i) sp[perm[i]] = s[i];
    const auto fa = expgrad::allocate(a, vol), fb = expgrad::allocate(b, vol);
    for (int i = 0; i < 4; ++i) ASSERT_NEAR(fa.alloc[i], fb.alloc[perm[i]], 1e-12);
    a = expgrad::update(std::move(a), censor_feedback(fa, s).feedback);
    b = expgrad::update(std::move(b), censor_feedback(fb, sp).feedback);
  }
}

TEST(ExpGrad, RegretWithinBoundOnRandomSequences) {
  const ProblemDims dims{6, 4, 1500};
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    sim::LiquidityTrace tr{dims.venues, dims.horizon, {}};
    std::vector<int> vols(dims.horizon);
    for (int t = 0; t < dims.horizon; ++t) {
      vols[t] = 1 + static_cast<int>(rng.uniform_int(dims.max_volume));
      for (int i = 0; i < dims.venues; ++i)
        tr.values.push_back(static_cast<double>(rng.uniform_int(static_cast<std::uint64_t>(i % 3 + 2))));
    }
    auto s = expgrad::init(dims, expgrad::default_eta(dims));
    double reward = 0.0;
    for (int t = 0; t < dims.horizon; ++t) {
      const auto a = expgrad::allocate(s, vols[t]);
      const auto out = censor_feedback(a, tr.round(t));
      reward += out.feedback.reward();
      s = expgrad::update(std::move(s), out.feedback);
    }
    const double best = comparator::hindsight(tr, vols, dims.max_volume).value;
    EXPECT_LE(best - reward, expgrad::regret_bound(dims)) << "seed " << seed;
  }
}

}  // namespace
}  // namespace darkpool
