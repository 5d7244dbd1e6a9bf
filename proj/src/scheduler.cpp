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

#include "v2xcast/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "v2xcast/errors.hpp"

namespace v2xcast::scheduler {

int resource_blocks_for_bandwidth(int bandwidth_mhz) {
  switch (bandwidth_mhz) {
    case 3:
      return 15;
    case 5:
      return 25;
    case 10:
      return 50;
    case 15:
      return 75;
    case 20:
      return 100;
    default:
      throw ConfigError("unsupported LTE bandwidth " + std::to_string(bandwidth_mhz) + " MHz");
  }
}

bool FramePlan::is_reserved(int tti) const {
  const int sf = tti % kSubframesPerFrame;
  return std::binary_search(reserved_subframes.begin(), reserved_subframes.end(), sf);
}

FramePlan make_frame_plan(int n_reserved, int n_rb, int n_re) {
  if (n_reserved < 0 || n_reserved > kMaxMbsfnSubframes) {
    throw ConfigError("MBSFN reservation must be 0.." + std::to_string(kMaxMbsfnSubframes) +
                      " subframes per frame");
  }
  if (n_rb < 1 || n_re < 1) {
    throw ConfigError("frame plan needs positive RB and RE counts");
  }
  // Alternate between the two halves of the frame.
  constexpr std::array<int, 6> preference{1, 6, 3, 8, 2, 7};
  FramePlan plan;
  plan.n_rb = n_rb;
  plan.n_re = n_re;
  plan.reserved_subframes.assign(preference.begin(), preference.begin() + n_reserved);
  std::sort(plan.reserved_subframes.begin(), plan.reserved_subframes.end());
  return plan;
}

std::string CqiPolicy::label() const {
  return (mode == CqiMode::fixed ? "fixed" : "adaptive") + std::to_string(cqi);
}

CqiPolicy CqiPolicy::parse(const std::string& label) {
  CqiPolicy p;
  std::string digits;
  if (label.rfind("fixed", 0) == 0) {
    p.mode = CqiMode::fixed;
    digits = label.substr(5);
  } else if (label.rfind("adaptive", 0) == 0) {
    p.mode = CqiMode::adaptive;
    digits = label.substr(8);
  } else {
    throw ConfigError("CQI policy '" + label + "' is neither fixed<k> nor adaptive<bound>");
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
    throw ConfigError("CQI policy '" + label + "' lacks a numeric CQI");
  }
  p.cqi = std::stoi(digits);
  if (p.mode == CqiMode::fixed && p.cqi < 1) {
    throw ConfigError("fixed CQI must be at least 1");
  }
  return p;
}

int select_mbsfn_cqi(const CqiState& state) {
  if (state.policy.mode == CqiMode::fixed) {
    return state.policy.cqi;
  }
  if (state.cqi_reports.empty()) {
    throw SchedulingError("adaptive CQI selection without any reports");
  }
  const int lowest = *std::min_element(state.cqi_reports.begin(), state.cqi_reports.end());
  return std::max(lowest, state.policy.cqi);
}

int required_subframes(std::int64_t packet_bits, int n_mbms_users, int n_rb_per_subframe,
                       int n_re_per_rb, double efficiency, int period_tti) {
  if (packet_bits <= 0 || n_mbms_users < 0 || n_rb_per_subframe <= 0 || n_re_per_rb <= 0 ||
      !(efficiency > 0.0) || period_tti <= 0) {
    throw ConfigError("subframe sizing needs positive arguments");
  }
  if (n_mbms_users == 0) {
    return 0;
  }
  const double demand = static_cast<double>(packet_bits) * n_mbms_users;
  const double per_subframe = static_cast<double>(n_rb_per_subframe) * n_re_per_rb * efficiency;
  const double frames_per_period = static_cast<double>(period_tti) / kSubframesPerFrame;
  const double per_frame = demand / per_subframe / frames_per_period;
  const int needed = static_cast<int>(std::ceil(per_frame - 1e-9));
  if (needed > kMaxMbsfnSubframes) {
    std::ostringstream msg;
    msg << "traffic needs " << needed << " MBSFN subframes per frame, at most "
        << kMaxMbsfnSubframes << " are available";
    throw CongestionInfeasible(msg.str(), needed);
  }
  return needed;
}

std::int64_t bits_carried(int rbs, int n_re, double efficiency) {
  return static_cast<std::int64_t>(std::floor(rbs * static_cast<double>(n_re) * efficiency + 1e-9));
}

int resource_blocks_needed(std::int64_t bits, int n_re, double efficiency) {
  if (bits <= 0) {
    return 0;
  }
  const double per_rb = n_re * efficiency;
  int k = static_cast<int>(std::ceil(static_cast<double>(bits) / per_rb));
  while (bits_carried(k, n_re, efficiency) < bits) {
    ++k;
  }
  while (k > 1 && bits_carried(k - 1, n_re, efficiency) >= bits) {
    --k;
  }
  return k;
}

MulticastSchedule schedule_multicast(std::span<const PendingCam> pending, const FramePlan& plan,
                                     double efficiency, int tti) {
  if (!plan.is_reserved(tti)) {
    throw SchedulingError("TTI " + std::to_string(tti) + " is not an MBSFN subframe");
  }
  std::vector<const PendingCam*> queue;
  for (const auto& p : pending) {
    if (p.residual_bits > 0) {
      queue.push_back(&p);
    }
  }
  std::stable_sort(queue.begin(), queue.end(), [](const PendingCam* a, const PendingCam* b) {
    return std::tie(a->order_tti, a->source) < std::tie(b->order_tti, b->source);
  });

  MulticastSchedule out;
  out.reassignable = queue.empty();
  int next_rb = 0;
  for (const PendingCam* p : queue) {
    if (next_rb >= plan.n_rb) {
      break;
    }
    const int need = resource_blocks_needed(p->residual_bits, plan.n_re, efficiency);
    const int give = std::min(need, plan.n_rb - next_rb);
    const std::int64_t bits =
        std::min(p->residual_bits, bits_carried(give, plan.n_re, efficiency));
    out.allocations.push_back({p->source, next_rb, give, bits});
    next_rb += give;
  }
  out.used_rbs = next_rb;
  return out;
}

std::vector<OrdinaryAllocation> schedule_unicast_ordinary(
    std::span<const OrdinaryUser> users, std::span<const CellResources> resources, int n_re,
    int tti, const link::CqiTable& table) {
  std::vector<OrdinaryAllocation> out;
  for (const auto& res : resources) {
    std::vector<const OrdinaryUser*> members;
    for (const auto& u : users) {
      if (u.cell == res.cell) {
        members.push_back(&u);
      }
    }
    if (members.empty()) {
      continue;
    }
    const int n = static_cast<int>(members.size());
    const int base = std::max(res.rb_count, 0) / n;
    const int extra = std::max(res.rb_count, 0) % n;
    const int first_extra = tti % n;
    int next_rb = res.rb_start;
    for (int k = 0; k < n; ++k) {
      const int rotated = (k - first_extra + n) % n;
      const int rbs = base + (rotated < extra ? 1 : 0);
      const OrdinaryUser& u = *members[static_cast<std::size_t>(k)];
      out.push_back({u.user_id, u.cell, next_rb, rbs, u.cqi,
                     rbs > 0 ? bits_carried(rbs, n_re, table.efficiency(u.cqi)) : 0});
      next_rb += rbs;
    }
  }
  return out;
}

std::vector<Delivery> expand_unicast_deliveries(int source, int order_tti, std::int64_t bits,
                                                std::span<const Receiver> receivers) {
  std::vector<Delivery> out;
  for (const auto& r : receivers) {
    if (r.user_id != source) {
      out.push_back({source, r.user_id, r.cell, order_tti, bits, r.cqi});
    }
  }
  return out;
}

UnicastCamSchedule schedule_unicast_cam_baseline(std::span<const Delivery> pending,
                                                 std::span<const int> cells, int n_rb, int n_re,
                                                 [[maybe_unused]] int tti,
                                                 const link::CqiTable& table) {
  UnicastCamSchedule out;
  std::vector<std::size_t> order(pending.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = pending[a];
    const auto& y = pending[b];
    return std::tie(x.order_tti, x.source, x.receiver) < std::tie(y.order_tti, y.source, y.receiver);
  });
  for (int cell : cells) {
    int next_rb = 0;
    for (std::size_t idx : order) {
      const auto& d = pending[idx];
      if (d.cell != cell || d.residual_bits <= 0) {
        continue;
      }
      if (next_rb >= n_rb) {
        break;
      }
      const double eff = table.efficiency(d.cqi);
      const int give = std::min(resource_blocks_needed(d.residual_bits, n_re, eff), n_rb - next_rb);
      out.allocations.push_back(
          {idx, cell, next_rb, give, std::min(d.residual_bits, bits_carried(give, n_re, eff))});
      next_rb += give;
    }
    out.leftover.push_back({cell, next_rb, n_rb - next_rb});
  }
  return out;
}

}  // namespace v2xcast::scheduler
