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

// Line-oriented scenario files and the registry of built-in scenarios.
//
//   # comment
//   name = two_venue_demo
//   kind = switching          # iid | switching | lower_bound | experts_reduction
//   venues = 2
//   max_volume = 20
//   horizon = 1000
//   seed = 1
//   volume = 20               # every round; or use [volume] blocks
//
//   [volume]                  # rounds start..end (1-based, inclusive)
//   start = 1
//   end = 1000
//   value = 20
//
//   [segment]                 # one venue (1-based) over start..end
//   venue = 1
//   start = 1
//   end = 1000
//   model = zbpl              # zbpl: p0, beta, s_max | two_point: level, prob
//   p0 = 0.3
//   beta = 1.2
//   s_max = 40
//
//   [notes]                   # free-form key = value pairs, echoed back
//   source = hand-written

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "darkpool/simulator.hpp"

namespace darkpool::sim {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline long long to_int(const std::string& v, int line) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw ParseError(line, "expected an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t to_u64(const std::string& v, int line) {
  std::size_t pos = 0;
  std::uint64_t x = 0;
  try {
    x = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
  }
  if (pos != v.size() || v.front() == '-') throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
  return x;
}

inline double to_double(const std::string& v, int line) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ParseError(line, "expected a number, got '" + v + "'");
  return x;
}

struct Block {
  std::string kind;  // "", "volume", "segment", "notes"
  int line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<int> lines;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
  const std::string& need(const std::string& key) const {
    if (const auto* v = find(key)) return *v;
    throw ParseError(line, "[" + kind + "] block is missing '" + key + "'");
  }
  int line_of(const std::string& key) const {
    for (std::size_t j = 0; j < entries.size(); ++j)
      if (entries[j].first == key) return lines[j];
    return line;
  }
};

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  using detail::Block;
  std::vector<Block> blocks(1);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "unterminated block header");
      const std::string kind = detail::trim(line.substr(1, line.size() - 2));
      if (kind != "volume" && kind != "segment" && kind != "notes")
        throw ParseError(lineno, "unknown block [" + kind + "]");
      blocks.push_back({kind, lineno, {}, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (blocks.back().find(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
    blocks.back().entries.emplace_back(key, value);
    blocks.back().lines.push_back(lineno);
  }

  Scenario sc;
  const Block& top = blocks.front();
  for (const auto& [k, v] : top.entries) {
    static const char* known[] = {"name", "kind", "venues", "max_volume", "horizon", "seed", "volume"};
    if (std::find(std::begin(known), std::end(known), k) == std::end(known))
      throw ParseError(top.line_of(k), "unknown key '" + k + "'");
  }
  auto top_need = [&](const std::string& key) -> const std::string& {
    if (const auto* v = top.find(key)) return *v;
    throw ParseError(lineno, "missing top-level key '" + key + "'");
  };
  sc.name = top.find("name") ? *top.find("name") : "unnamed";
  try {
    sc.kind = top.find("kind") ? parse_kind(*top.find("kind")) : ScenarioKind::kIid;
  } catch (const std::invalid_argument& e) {
    throw ParseError(top.line_of("kind"), e.what());
  }
  sc.dims.venues = static_cast<int>(detail::to_int(top_need("venues"), top.line_of("venues")));
  sc.dims.max_volume = static_cast<int>(detail::to_int(top_need("max_volume"), top.line_of("max_volume")));
  sc.dims.horizon = static_cast<int>(detail::to_int(top_need("horizon"), top.line_of("horizon")));
  if (const auto* s = top.find("seed")) sc.seed = detail::to_u64(*s, top.line_of("seed"));
  try {
    sc.dims.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(top.line, e.what());
  }
  if (sc.dims.horizon > 100000000) throw ParseError(top.line_of("horizon"), "horizon too large");

  bool has_volume_blocks = false;
  if (const auto* v = top.find("volume")) {
    sc.volumes.assign(sc.dims.horizon, static_cast<int>(detail::to_int(*v, top.line_of("volume"))));
  } else {
    sc.volumes.assign(sc.dims.horizon, -1);
  }

  for (std::size_t b = 1; b < blocks.size(); ++b) {
    const Block& blk = blocks[b];
    if (blk.kind == "notes") {
      for (const auto& [k, v] : blk.entries) sc.notes[k] = v;
      continue;
    }
    auto geti = [&](const std::string& key) {
      return static_cast<int>(detail::to_int(blk.need(key), blk.line_of(key)));
    };
    if (blk.kind == "volume") {
      has_volume_blocks = true;
      const int start = geti("start"), end = geti("end"), value = geti("value");
      if (start < 1 || end > sc.dims.horizon || start > end) throw ParseError(blk.line, "[volume] bounds outside [1, T]");
      for (int t = start; t <= end; ++t) sc.volumes[t - 1] = value;
      continue;
    }
    Segment seg;
    seg.venue = geti("venue") - 1;
    seg.start = geti("start");
    seg.end = geti("end");
    const std::string& model = blk.need("model");
    if (model == "zbpl") {
      ZbplParams p;
      p.p0 = detail::to_double(blk.need("p0"), blk.line_of("p0"));
      p.beta = detail::to_double(blk.need("beta"), blk.line_of("beta"));
      p.s_max = geti("s_max");
      seg.model = p;
    } else if (model == "two_point") {
      TwoPointParams p;
      p.level = geti("level");
      p.prob = detail::to_double(blk.need("prob"), blk.line_of("prob"));
      seg.model = p;
    } else {
      throw ParseError(blk.line_of("model"), "unknown model '" + model + "'");
    }
    sc.segments.push_back(seg);
  }
  if (top.find("volume") && has_volume_blocks)
    throw ParseError(top.line_of("volume"), "give either 'volume' or [volume] blocks, not both");
  for (int v : sc.volumes)
    if (v < 0) throw ParseError(lineno, "volume sequence does not cover every round");
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, e.what());
  }
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  try {
    return parse_scenario(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ":" + e.what());
  }
}

inline std::string serialize(const Scenario& sc) {
  std::ostringstream out;
  out << "name = " << sc.name << "\n"
      << "kind = " << to_string(sc.kind) << "\n"
      << "venues = " << sc.dims.venues << "\n"
      << "max_volume = " << sc.dims.max_volume << "\n"
      << "horizon = " << sc.dims.horizon << "\n"
      << "seed = " << sc.seed << "\n";
  if (sc.constant_volume()) {
    out << "volume = " << sc.volumes.front() << "\n";
  } else {
    for (std::size_t t = 0; t < sc.volumes.size();) {
      std::size_t e = t;
      while (e + 1 < sc.volumes.size() && sc.volumes[e + 1] == sc.volumes[t]) ++e;
      out << "\n[volume]\nstart = " << t + 1 << "\nend = " << e + 1 << "\nvalue = " << sc.volumes[t] << "\n";
      t = e + 1;
    }
  }
  for (const auto& seg : sc.segments) {
    out << "\n[segment]\nvenue = " << seg.venue + 1 << "\nstart = " << seg.start << "\nend = " << seg.end << "\n";
    if (const auto* z = std::get_if<ZbplParams>(&seg.model)) {
      out << "model = zbpl\np0 = " << fmt_double(z->p0) << "\nbeta = " << fmt_double(z->beta)
          << "\ns_max = " << z->s_max << "\n";
    } else {
      const auto& tp = std::get<TwoPointParams>(seg.model);
      out << "model = two_point\nlevel = " << tp.level << "\nprob = " << fmt_double(tp.prob) << "\n";
    }
  }
  if (!sc.notes.empty()) {
    out << "\n[notes]\n";
    for (const auto& [k, v] : sc.notes) out << k << " = " << v << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::function<Scenario()> make;
};

inline constexpr std::uint64_t kBuiltinSeed = 20260101;

inline const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> list = {
      {"iid48", "48 venues, T=2000, V=200, iid Zero Bin + power law",
       [] { return make_iid48(kBuiltinSeed); }},
      {"two_venue_switch", "2 venues swap favourable/unfavourable parameters after round 12500, T=25000",
       [] { return make_two_venue_switch(kBuiltinSeed); }},
      {"five_venue_v200", "5 venues with oscillating power-law exponents, V=200",
       [] { return make_five_venue(kBuiltinSeed, 200); }},
      {"five_venue_v400", "5 venues with oscillating power-law exponents, V=400",
       [] { return make_five_venue(kBuiltinSeed, 400); }},
      {"lower_bound", "K=4, V=4, T=20000 two-point family with epsilon = 0.1",
       [] { return make_lower_bound(4, 4, 20000, 0.1, kBuiltinSeed); }},
      {"lower_bound_default", "K=4, V=4, T=20000 two-point family with epsilon = sqrt(K/(TV))/4",
       [] { return make_lower_bound(4, 4, 20000, default_lower_bound_epsilon(4, 4, 20000), kBuiltinSeed); }},
      {"bernoulli_bandit", "V=1, two arms paying one share with probability 0.5 and 0.6, T=50000",
       [] { return make_bernoulli_bandit({0.5, 0.6}, 50000, kBuiltinSeed); }},
      {"experts_reduction", "5 experts with Bernoulli rewards (0.3..0.7) scaled by the allocation, V=10, T=5000",
       [] { return make_experts_scenario({0.3, 0.4, 0.5, 0.6, 0.7}, 10, 5000, kBuiltinSeed); }},
  };
  return list;
}

inline const BuiltinScenario* find_builtin(const std::string& name) {
  for (const auto& b : builtin_scenarios())
    if (b.name == name) return &b;
  return nullptr;
}

// A built-in name (optionally prefixed "builtin:") or a file path.
inline Scenario resolve_scenario(const std::string& ref) {
  std::string name = ref;
  if (name.rfind("builtin:", 0) == 0) {
    name = name.substr(8);
    if (const auto* b = find_builtin(name)) return b->make();
    throw std::invalid_argument("unknown built-in scenario: " + name);
  }
  if (const auto* b = find_builtin(name)) return b->make();
  return load_scenario(ref);
}

}  // namespace darkpool::sim
