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

// Exponentiated gradient over a product of V simplices. Unit v of the volume
// is sent to venue i with weight x^v_i; the fractional allocation of a round
// with volume V^t is the column sum of the first V^t rows. The censor bit g_i
// (everything allocated to i was consumed) is a subgradient of min(alloc, s)
// and is applied to every active row.

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "darkpool/core.hpp"

namespace darkpool::expgrad {

struct EgState {
  WeightMatrix weights;
  double eta = 0.0;
};

// sqrt(ln K / ((e - 2) T)), capped at 1.
inline double default_eta(const ProblemDims& dims) {
  dims.validate();
  const double e_minus_2 = std::numbers::e - 2.0;
  return std::min(1.0, std::sqrt(std::log(static_cast<double>(dims.venues)) / (e_minus_2 * dims.horizon)));
}

// Regret guarantee of default_eta: 3 V sqrt(T ln K).
inline double regret_bound(const ProblemDims& dims) {
  return 3.0 * dims.max_volume * std::sqrt(dims.horizon * std::log(static_cast<double>(dims.venues)));
}

inline EgState init(const ProblemDims& dims, double eta) {
  dims.validate();
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("expgrad::init: eta must lie in (0, 1]");
  return {WeightMatrix::uniform(dims.max_volume, dims.venues), eta};
}

inline FractionalAllocation allocate(const WeightMatrix& w, int volume) {
  if (volume < 0 || volume > w.units()) throw std::out_of_range("expgrad::allocate: volume out of range");
  FractionalAllocation a;
  a.volume = volume;
  a.alloc.assign(w.venues(), 0.0);
  for (int v = 0; v < volume; ++v) {
    const auto row = w.row(v);
    for (int i = 0; i < w.venues(); ++i) a.alloc[i] += row[i];
  }
  return a;
}

inline FractionalAllocation allocate(const EgState& state, int volume) { return allocate(state.weights, volume); }

// Rows v < volume are reweighted by exp(eta * g_i); the rest are untouched.
inline EgState update(EgState state, std::span<const std::uint8_t> gbits, int volume) {
  const auto k = static_cast<std::size_t>(state.weights.venues());
  if (gbits.size() != k) throw std::invalid_argument("expgrad::update: gradient length != venues");
  if (volume < 0 || volume > state.weights.units())
    throw std::out_of_range("expgrad::update: volume out of range");
  std::vector<int> split(k, volume);
  std::vector<double> g(gbits.begin(), gbits.end());
  state.weights.exponentiate(volume, state.eta, split, g, g);
  return state;
}

inline EgState update(EgState state, const Observation& obs) {
  const auto g = subgradient_bits(obs);
  return update(std::move(state), g, obs.volume);
}

}  // namespace darkpool::expgrad
