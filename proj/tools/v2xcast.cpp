// Copyright 2026 The v2xcast Authors.
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

// v2xcast: run one scenario or a comparison matrix and write CSV reports.
//
//   v2xcast run scenarios/multicast_5mhz.scenario --out out/run
//   v2xcast compare --modes multicast,unicast --bandwidths 5 --cqi fixed3 --out out/cmp
//
// V2XCAST_WORKERS caps the number of replicate threads.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "v2xcast/engine.hpp"
#include "v2xcast/errors.hpp"
#include "v2xcast/report.hpp"
#include "v2xcast/scenario.hpp"

namespace {

using v2xcast::engine::ScenarioConfig;

void apply_overrides(ScenarioConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& seeds, const std::optional<int>& n_tti) {
  if (seed) {
    cfg.seed = *seed;
  }
  if (seeds) {
    cfg.replications = *seeds;
  }
  if (n_tti) {
    cfg.n_tti = *n_tti;
  }
  v2xcast::engine::validate(cfg);
}

void print_row(const v2xcast::metrics::SummaryRow& r) {
  std::cout << r.mode << " " << r.bandwidth_mhz << "MHz " << r.cqi_policy
            << ": latency " << v2xcast::metrics::format_number(r.mean_latency_tti)
            << " TTI, throughput " << v2xcast::metrics::format_number(r.mean_throughput_mbps)
            << " Mbps, utilization " << v2xcast::metrics::format_number(r.utilization_pct) << "%"
            << (r.congested ? " (congested)" : "") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TTI-level simulator of multicast and unicast CAM delivery in LTE"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<int> n_tti;

  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--seeds", seeds, "Override the number of replicates")->check(CLI::PositiveNumber);
  run->add_option("--tti", n_tti, "Override the run length in TTIs")->check(CLI::NonNegativeNumber);

  std::vector<std::string> modes{"multicast"};
  std::vector<int> bandwidths{5};
  std::vector<std::string> policies{"fixed3"};
  auto* cmp = app.add_subcommand("compare", "Run a modes x bandwidths x CQI policies matrix");
  cmp->add_option("--scenario", scenario_path, "Base scenario file (defaults otherwise)");
  cmp->add_option("--modes", modes, "multicast, unicast")->delimiter(',');
  cmp->add_option("--bandwidths", bandwidths, "Bandwidths in MHz")->delimiter(',');
  cmp->add_option("--cqi", policies, "fixed<k> or adaptive<bound>")->delimiter(',');
  cmp->add_option("--out", out_dir, "Output directory")->required();
  cmp->add_option("--seed", seed, "Override the master seed");
  cmp->add_option("--seeds", seeds, "Override the number of replicates")->check(CLI::PositiveNumber);
  cmp->add_option("--tti", n_tti, "Override the run length in TTIs")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const int workers = v2xcast::engine::default_workers();
    if (run->parsed()) {
      auto cfg = v2xcast::scenario::load_scenario(scenario_path);
      apply_overrides(cfg, seed, seeds, n_tti);
      const auto result = v2xcast::engine::replicate(cfg, cfg.replications, workers);
      v2xcast::report::write_run(out_dir, cfg, result);
      print_row(result.summary);
      return 0;
    }
    ScenarioConfig base;
    if (!scenario_path.empty()) {
      base = v2xcast::scenario::load_scenario(scenario_path);
    }
    apply_overrides(base, seed, seeds, n_tti);
    std::vector<v2xcast::engine::TransmissionMode> parsed_modes;
    for (const auto& m : modes) {
      parsed_modes.push_back(v2xcast::engine::parse_mode(m));
    }
    std::vector<v2xcast::scheduler::CqiPolicy> parsed_policies;
    for (const auto& p : policies) {
      parsed_policies.push_back(v2xcast::scheduler::CqiPolicy::parse(p));
    }
    for (int bw : bandwidths) {
      v2xcast::scheduler::resource_blocks_for_bandwidth(bw);
    }
    const auto cells = v2xcast::report::expand_matrix(parsed_modes, bandwidths, parsed_policies);
    const auto result = v2xcast::report::compare(out_dir, base, cells, workers);
    for (const auto& r : result.rows) {
      print_row(r);
    }
    for (const auto& p : result.scaling) {
      std::cout << p.mode << " " << p.cqi_policy << " " << p.bandwidth_b << "/" << p.bandwidth_a
                << " MHz throughput ratio: predicted "
                << v2xcast::metrics::format_number(p.predicted_ratio) << ", measured "
                << v2xcast::metrics::format_number(p.measured_ratio) << "\n";
    }
    return 0;
  } catch (const v2xcast::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
