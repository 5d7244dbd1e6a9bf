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

// Output directories for single runs and comparison matrices.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "v2xcast/engine.hpp"

namespace v2xcast::report {

/// Writes latency_combined.csv, latency_mean.csv, one
/// latency_user_<replicate>-<user>.csv per MBMS user, throughput_ordinary.csv,
/// summary.csv, replicates.csv and run_manifest.yaml into `out`.
void write_run(const std::filesystem::path& out, const engine::ScenarioConfig& cfg,
               const engine::ReplicateResult& result);

/// Config echo, master seed, per-replicate seeds and the config hash.
std::string manifest(const engine::ScenarioConfig& cfg, const engine::ReplicateResult& result);

struct MatrixCell {
  engine::TransmissionMode mode = engine::TransmissionMode::multicast;
  int bandwidth_mhz = 5;
  scheduler::CqiPolicy cqi_policy;

  /// Directory and column name, e.g. "multicast_5mhz_fixed3".
  std::string label() const;
};

/// Full cartesian product, modes outermost.
std::vector<MatrixCell> expand_matrix(const std::vector<engine::TransmissionMode>& modes,
                                      const std::vector<int>& bandwidths,
                                      const std::vector<scheduler::CqiPolicy>& policies);

struct BandwidthPair {
  std::string mode;
  std::string cqi_policy;
  int bandwidth_a = 0;
  int bandwidth_b = 0;
  double predicted_ratio = 0.0;
  double measured_ratio = 0.0;
};

/// Pairs of cells that differ only in bandwidth (a < b).
std::vector<BandwidthPair> bandwidth_pairs(const std::vector<metrics::SummaryRow>& rows);

struct CompareResult {
  std::vector<metrics::SummaryRow> rows;
  std::vector<BandwidthPair> scaling;
};

/// Runs every cell over `base` and writes one subdirectory per cell, the
/// overlay_*.csv ECDFs on a shared abscissa, summary.csv and
/// bandwidth_scaling.csv. Needs at least two cells.
CompareResult compare(const std::filesystem::path& out, const engine::ScenarioConfig& base,
                      const std::vector<MatrixCell>& cells, int workers = 0);

}  // namespace v2xcast::report
