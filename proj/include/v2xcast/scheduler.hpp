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

// MBSFN subframe reservation, multicast CQI selection and RB allocation.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "v2xcast/link.hpp"

namespace v2xcast::scheduler {

inline constexpr int kSubframesPerFrame = 10;
/// Subframes 0, 4, 5 and 9 carry synchronization and paging in FDD.
inline constexpr std::array<int, 6> kMbsfnEligibleSubframes{1, 2, 3, 6, 7, 8};
inline constexpr int kMaxMbsfnSubframes = static_cast<int>(kMbsfnEligibleSubframes.size());

/// LTE resource blocks per subframe for a channel bandwidth in MHz.
int resource_blocks_for_bandwidth(int bandwidth_mhz);

struct FramePlan {
  /// Reserved subframe indices within a radio frame, ascending.
  std::vector<int> reserved_subframes;
  int n_rb = 25;
  int n_re = 102;

  bool is_reserved(int tti) const;
};

/// Reserves `n_reserved` eligible subframes, spread over the frame.
FramePlan make_frame_plan(int n_reserved, int n_rb, int n_re);

enum class CqiMode { fixed, adaptive };

struct CqiPolicy {
  CqiMode mode = CqiMode::fixed;
  /// Fixed mode: the CQI used. Adaptive mode: the lower bound, 0 for none.
  int cqi = 3;

  /// "fixed3", "adaptive3", ...
  std::string label() const;
  static CqiPolicy parse(const std::string& label);
  friend bool operator==(const CqiPolicy&, const CqiPolicy&) = default;
};

struct CqiState {
  std::vector<int> cqi_reports;
  CqiPolicy policy;
};

/// Fixed: the configured CQI. Adaptive: max(min report, bound).
int select_mbsfn_cqi(const CqiState& state);

/// Smallest number of MBSFN subframes per radio frame whose capacity over
/// one generation period carries one packet from every MBMS user. Throws
/// CongestionInfeasible above the per-frame limit.
int required_subframes(std::int64_t packet_bits, int n_mbms_users, int n_rb_per_subframe,
                       int n_re_per_rb, double efficiency, int period_tti);

/// Bits carried by `rbs` resource blocks (rounded down).
std::int64_t bits_carried(int rbs, int n_re, double efficiency);
/// Fewest resource blocks that carry `bits`.
int resource_blocks_needed(std::int64_t bits, int n_re, double efficiency);

struct PendingCam {
  int source = 0;
  /// Start of the packet's latency clock; older packets go first.
  int order_tti = 0;
  std::int64_t residual_bits = 0;
};

struct CamAllocation {
  int source = 0;
  int rb_start = 0;
  int rb_count = 0;
  std::int64_t bits = 0;
};

struct MulticastSchedule {
  std::vector<CamAllocation> allocations;
  int used_rbs = 0;
  /// Nothing to send: the whole subframe can serve unicast traffic.
  bool reassignable = false;
};

/// FIFO allocation of one MBSFN subframe. Throws SchedulingError when `tti`
/// is not a reserved subframe.
MulticastSchedule schedule_multicast(std::span<const PendingCam> pending, const FramePlan& plan,
                                     double efficiency, int tti);

struct OrdinaryUser {
  int user_id = 0;
  int cell = 0;
  int cqi = 1;
};

/// Contiguous RB range a cell can give to unicast traffic this TTI.
struct CellResources {
  int cell = 0;
  int rb_start = 0;
  int rb_count = 0;
};

struct OrdinaryAllocation {
  int user_id = 0;
  int cell = 0;
  int rb_start = 0;
  int rb_count = 0;
  int cqi = 1;
  std::int64_t bits = 0;
};

/// Round robin per cell: every user gets floor(N/n) RBs and the remainder
/// rotates with the TTI. Users of cells without resources get nothing.
std::vector<OrdinaryAllocation> schedule_unicast_ordinary(
    std::span<const OrdinaryUser> users, std::span<const CellResources> resources, int n_re,
    int tti, const link::CqiTable& table = link::default_cqi_table());

/// One unicast copy of a CAM to one receiver.
struct Delivery {
  int source = 0;
  int receiver = 0;
  int cell = 0;
  int order_tti = 0;
  std::int64_t residual_bits = 0;
  int cqi = 1;
};

struct Receiver {
  int user_id = 0;
  int cell = 0;
  int cqi = 1;
};

/// Copies of one CAM for every receiver except the source itself.
std::vector<Delivery> expand_unicast_deliveries(int source, int order_tti, std::int64_t bits,
                                                std::span<const Receiver> receivers);

struct DeliveryAllocation {
  std::size_t delivery = 0;  // index into the input span
  int cell = 0;
  int rb_start = 0;
  int rb_count = 0;
  std::int64_t bits = 0;
};

struct UnicastCamSchedule {
  std::vector<DeliveryAllocation> allocations;
  /// What each cell has left for ordinary users.
  std::vector<CellResources> leftover;
};

/// Serves pending copies FIFO per cell at each receiver's CQI before any
/// ordinary traffic.
UnicastCamSchedule schedule_unicast_cam_baseline(
    std::span<const Delivery> pending, std::span<const int> cells, int n_rb, int n_re, int tti,
    const link::CqiTable& table = link::default_cqi_table());

}  // namespace v2xcast::scheduler
