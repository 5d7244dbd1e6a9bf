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

// The TTI loop and its configuration.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "v2xcast/link.hpp"
#include "v2xcast/metrics.hpp"
#include "v2xcast/scheduler.hpp"

namespace v2xcast::engine {

enum class TransmissionMode { multicast, unicast_baseline };

std::string to_string(TransmissionMode mode);
TransmissionMode parse_mode(const std::string& text);

/// Everything that defines a run. Defaults reproduce the reference
/// scenario: 7-cell MBSFN area in a 19-cell layout, 6 users and 3 cars per
/// cell at 100 km/h, 300-byte CAMs at 10 Hz, 5 MHz, fixed CQI 3.
struct ScenarioConfig {
  // layout
  int mbsfn_rings = 1;
  int interference_rings = 1;
  double inter_site_distance_m = 500.0;
  // users
  int users_per_cell = 6;
  int cars_per_cell = 3;
  double car_speed_kmh = 100.0;
  // radio
  int bandwidth_mhz = 5;
  double carrier_ghz = 2.14;
  int n_re_per_rb = 102;
  std::string tap_profile = "VehA";
  double shadowing_sigma_db = 8.0;
  double pathloss_intercept_db = 128.1;
  double pathloss_slope_db = 37.6;
  double min_distance_m = 35.0;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 9.0;
  double tx_power_per_rb_dbm = 26.0;
  // link
  double bler_slope_db = 1.0;
  int feedback_delay_tti = 0;
  /// Every transport block decodes (BLER forced to zero).
  bool ideal_decoding = false;
  /// Replaces the embedded CQI table when set.
  std::optional<link::CqiTable> cqi_table;
  // traffic
  int packet_bytes = 300;
  int period_tti = 100;
  // scheduling
  TransmissionMode mode = TransmissionMode::multicast;
  scheduler::CqiPolicy cqi_policy{scheduler::CqiMode::fixed, 3};
  /// CQI whose efficiency sizes the MBSFN reservation, whatever the policy.
  int reservation_cqi = 3;
  bool reassign_unused_subframes = true;
  // simulation
  int n_tti = 10000;
  std::uint64_t seed = 1;
  int replications = 4;

  const link::CqiTable& table() const {
    return cqi_table ? *cqi_table : link::default_cqi_table();
  }
  std::int64_t packet_bits() const { return std::int64_t{8} * packet_bytes; }
  int n_rb() const { return scheduler::resource_blocks_for_bandwidth(bandwidth_mhz); }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& cfg);

struct TtiEvent {
  int tti = 0;
  bool mbsfn_subframe = false;
  /// CQI used for CAMs this TTI, 0 when none were sent.
  int selected_cqi = 0;
  /// RBs carrying CAMs, summed over MBSFN-area cells.
  int cam_rbs = 0;
  /// RBs ordinary users could not use, summed over MBSFN-area cells.
  int withheld_rbs = 0;
  /// Largest per-cell RB total handed out this TTI.
  int max_cell_rbs = 0;
  std::int64_t backlog_bits = 0;

  friend bool operator==(const TtiEvent&, const TtiEvent&) = default;
};

struct OrdinaryThroughput {
  int user_id = 0;
  int cell = 0;
  double mbps = 0.0;

  friend bool operator==(const OrdinaryThroughput&, const OrdinaryThroughput&) = default;
};

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  int reserved_subframes = 0;
  std::vector<int> mbms_users;
  std::vector<TtiEvent> events;
  metrics::LatencyMatrix latency;
  std::vector<OrdinaryThroughput> throughput;
  metrics::UtilizationReport utilization;
  bool reservation_infeasible = false;
  /// CAMs replaced while the scheduler still held unsent bits of them.
  int overruns = 0;
  metrics::SummaryRow summary;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// What a multicast subframe looked like, for observers.
struct MulticastTrace {
  int tti = 0;
  std::vector<scheduler::PendingCam> pending;
  int selected_cqi = 0;
  scheduler::MulticastSchedule schedule;
};

struct RunHooks {
  /// Called for every reserved MBSFN subframe after scheduling.
  std::function<void(const MulticastTrace&)> on_multicast;
  /// Called once per TTI with a digest of the channel snapshot.
  std::function<void(int tti, std::uint64_t channel_digest)> on_channel;
  /// Forces a decode outcome for (tti, source, receiver) when it returns a
  /// value. A multicast subframe is one transport block; `source` is then
  /// the first CAM in it.
  std::function<std::optional<bool>(int tti, int source, int receiver)> decode_override;
};

/// Latency matrix rows kept per user: every car has generated that many
/// packets at least one period before the run ends.
int recorded_packets(const ScenarioConfig& cfg);

RunRecord run(const ScenarioConfig& cfg, const RunHooks& hooks = {});

/// Seed of replicate `k`; replicate 0 uses the master seed itself.
std::uint64_t replicate_seed(std::uint64_t master, int k);

struct Spread {
  double mean = 0.0;
  double stddev = 0.0;
};

struct ReplicateResult {
  std::vector<RunRecord> runs;
  /// Columns of all replicates side by side.
  metrics::LatencyMatrix latency;
  std::vector<OrdinaryThroughput> throughput;
  /// Metric means over replicates.
  metrics::SummaryRow summary;
  Spread mean_latency_tti;
  Spread mean_throughput_mbps;
  Spread utilization_pct;
};

/// Independent runs with derived seeds on up to `workers` threads
/// (0 picks V2XCAST_WORKERS or the hardware concurrency).
ReplicateResult replicate(const ScenarioConfig& cfg, int n_seeds, int workers = 0);

/// Worker count from V2XCAST_WORKERS, else the hardware concurrency.
int default_workers();

}  // namespace v2xcast::engine
