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


// Command-line front end: run experiments, list scenarios, inspect the
// hindsight comparator.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "darkpool/darkpool.hpp"

namespace fs = std::filesystem;
using namespace darkpool;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<harness::AlgorithmId> parse_algorithms(const std::string& list, const sim::Scenario& sc) {
  std::vector<harness::AlgorithmId> out;
  for (const auto& name : split_list(list)) {
    if (name == "all") {
      for (auto a : harness::kAllAlgorithms)
        if (sc.kind != sim::ScenarioKind::kExpertsReduction || !harness::integral(a)) out.push_back(a);
      continue;
    }
    out.push_back(harness::parse_algorithm(name));
  }
  if (out.empty()) throw std::invalid_argument("no algorithm given");
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (out[i] == out[j]) throw std::invalid_argument(std::string("algorithm listed twice: ") + to_string(out[i]));
  return out;
}

struct RunArgs {
  std::string algos = "all";
  std::string scenario;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  std::string emit = "csv";
  int threads = 0;
  double eta = 0.0;
  double gamma = -1.0;
};

int cmd_run(const RunArgs& a) {
  const auto sc = sim::resolve_scenario(a.scenario);
  const auto algos = parse_algorithms(a.algos, sc);
  bool csv = false, svg = false;
  for (const auto& e : split_list(a.emit)) {
    if (e == "csv") csv = true;
    else if (e == "svg") svg = true;
    else throw std::invalid_argument("unknown --emit format: " + e);
  }

  harness::RunOptions opt;
  opt.trials = a.trials;
  opt.seed = a.seed;
  opt.threads = a.threads;
  opt.keep_raw = false;
  if (a.eta > 0.0) opt.config.eta = a.eta;
  if (a.gamma >= 0.0) opt.config.gamma = a.gamma;
  const auto tr = harness::run_experiment(algos, sc, opt);

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  output::write_file((dir / "scenario.cfg").string(), sim::serialize(sc));
  const auto stats = output::stats_of(tr);
  if (csv) output::write_file((dir / "trace.csv").string(), output::to_csv(stats));
  if (svg) output::write_file((dir / "trace.svg").string(), output::to_svg(stats, sc.name));

  std::ostringstream summary;
  summary << "scenario " << sc.name << " K=" << sc.dims.venues << " V=" << sc.dims.max_volume
          << " T=" << sc.dims.horizon << " trials=" << a.trials << " seed=" << a.seed << "\n";
  summary << "comparator " << output::fmt(tr.mean_comparator.back()) << "\n";
  char line[256];
  for (const auto& s : tr.series) {
    std::snprintf(line, sizeof line, "%-11s reward %.3f +- %.3f  regret %.3f  regret/T %.5f\n", to_string(s.algorithm),
                  s.final_reward(), s.stderr_cum_reward.back(), s.mean_regret.back(),
                  s.mean_regret.back() / sc.dims.horizon);
    summary << line;
  }
  output::write_file((dir / "summary.txt").string(), summary.str());
  std::cout << summary.str();
  return 0;
}

int cmd_list() {
  for (const auto& b : sim::builtin_scenarios()) std::printf("%-20s %s\n", b.name.c_str(), b.description.c_str());
  return 0;
}

int cmd_show(const std::string& ref) {
  std::cout << sim::serialize(sim::resolve_scenario(ref));
  return 0;
}

int cmd_comparator(const std::string& ref, std::uint64_t seed, int trial, bool dump) {
  const auto sc = sim::resolve_scenario(ref);
  if (trial < 0) throw std::invalid_argument("--trial must be >= 0");
  const auto trace = harness::trial_trace(sc, harness::trial_seed(sc.seed, seed, trial));
  const auto prefix = harness::comparator_prefix(sc, trace);
  std::printf("scenario %s trial %d seed %llu\n", sc.name.c_str(), trial, static_cast<unsigned long long>(seed));
  std::printf("value %s\n", output::fmt(prefix.back()).c_str());
  if (sc.kind == sim::ScenarioKind::kExpertsReduction) {
    std::printf("comparator: best single expert times volume\n");
  } else {
    const auto best = comparator::hindsight(trace, sc.volumes, sc.dims.max_volume);
    const int top = *std::max_element(sc.volumes.begin(), sc.volumes.end());
    const auto units = comparator::live_units(best.assignment, sc.dims.venues, top);
    std::printf("units");
    for (int u : units) std::printf(" %d", u);
    std::printf("\n");
    if (dump) {
      std::printf("assignment");
      for (int i : best.assignment) std::printf(" %d", i + 1);
      std::printf("\n");
    }
  }
  if (dump) {
    std::printf("round,comparator_cum\n");
    for (std::size_t t = 0; t < prefix.size(); ++t) std::printf("%zu,%s\n", t + 1, output::fmt(prefix[t]).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dark pool allocation experiments"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run algorithms on a scenario and write traces");
  run_cmd->add_option("--algo", run.algos, "Comma-separated algorithm ids or 'all'")->capture_default_str();
  run_cmd->add_option("--scenario", run.scenario, "Built-in name or scenario file")->required();
  run_cmd->add_option("--trials", run.trials, "Independent trials")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Master seed")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--emit", run.emit, "Comma-separated outputs: csv, svg")->capture_default_str();
  run_cmd->add_option("--threads", run.threads, "Worker threads, 0 for all cores")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--eta", run.eta, "Override the learning rate");
  run_cmd->add_option("--gamma", run.gamma, "Override the exploration rate");

  auto* sc_cmd = app.add_subcommand("scenarios", "Built-in scenarios");
  sc_cmd->require_subcommand(1);
  auto* list_cmd = sc_cmd->add_subcommand("list", "List built-in scenarios");
  std::string show_ref;
  auto* show_cmd = sc_cmd->add_subcommand("show", "Print a scenario in file format");
  show_cmd->add_option("scenario", show_ref)->required();

  std::string cmp_ref;
  std::uint64_t cmp_seed = 1;
  int cmp_trial = 0;
  bool cmp_dump = false;
  auto* cmp_cmd = app.add_subcommand("comparator", "Best fixed assignment for one trial");
  cmp_cmd->add_option("--scenario", cmp_ref, "Built-in name or scenario file")->required();
  cmp_cmd->add_option("--seed", cmp_seed, "Master seed")->capture_default_str();
  cmp_cmd->add_option("--trial", cmp_trial, "Trial index")->capture_default_str();
  cmp_cmd->add_flag("--dump", cmp_dump, "Print the assignment and the per-round cumulative value");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run);
    if (*list_cmd) return cmd_list();
    if (*show_cmd) return cmd_show(show_ref);
    if (*cmp_cmd) return cmd_comparator(cmp_ref, cmp_seed, cmp_trial, cmp_dump);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "darkpool_cli: error: %s\n", e.what());
    return 1;
  }
  return 1;
}
