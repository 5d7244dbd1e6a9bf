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

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "v2xcast/errors.hpp"
#include "v2xcast/scheduler.hpp"

using namespace v2xcast;
using namespace v2xcast::scheduler;

TEST_CASE("bandwidth to resource blocks") {
  CHECK(resource_blocks_for_bandwidth(5) == 25);
  CHECK(resource_blocks_for_bandwidth(20) == 100);
  CHECK(resource_blocks_for_bandwidth(10) == 50);
  CHECK_THROWS_AS(resource_blocks_for_bandwidth(7), ConfigError);
}

TEST_CASE("CQI selection with and without a lower bound") {
  CHECK(select_mbsfn_cqi({{5, 7, 9}, {CqiMode::adaptive, 3}}) == 5);
  CHECK(select_mbsfn_cqi({{1, 2, 4}, {CqiMode::adaptive, 3}}) == 3);
  CHECK(select_mbsfn_cqi({{1, 2, 4}, {CqiMode::adaptive, 0}}) == 1);
  CHECK(select_mbsfn_cqi({{1, 2, 4}, {CqiMode::fixed, 3}}) == 3);
  CHECK(select_mbsfn_cqi({{}, {CqiMode::fixed, 3}}) == 3);
  CHECK_THROWS_AS(select_mbsfn_cqi({{}, {CqiMode::adaptive, 3}}), SchedulingError);
}

TEST_CASE("CQI policy labels round-trip") {
  for (const char* s : {"fixed3", "adaptive3", "adaptive0", "fixed15"}) {
    CHECK(CqiPolicy::parse(s).label() == s);
  }
  CHECK(CqiPolicy::parse("adaptive3") == CqiPolicy{CqiMode::adaptive, 3});
  CHECK_THROWS_AS(CqiPolicy::parse("fixed"), ConfigError);
  CHECK_THROWS_AS(CqiPolicy::parse("fixed0"), ConfigError);
  CHECK_THROWS_AS(CqiPolicy::parse("greedy3"), ConfigError);
}

TEST_CASE("reservation size for the reference traffic") {
  const double eff = link::cqi_efficiency(3);
  CHECK(required_subframes(2400, 21, 25, 102, eff, 100) == 6);
  CHECK(required_subframes(2400, 21, 100, 102, eff, 100) == 2);
  CHECK(required_subframes(2400, 0, 25, 102, eff, 100) == 0);
  CHECK_THROWS_AS(required_subframes(2400, 25, 25, 102, eff, 100), CongestionInfeasible);
  try {
    required_subframes(2400, 1000, 25, 102, eff, 100);
    FAIL("expected congestion");
  } catch (const CongestionInfeasible& e) {
    CHECK(e.required_subframes() > kMaxMbsfnSubframes);
  }
  CHECK_THROWS_AS(required_subframes(0, 1, 25, 102, eff, 100), ConfigError);
}

TEST_CASE("reservation grows with demand and shrinks with capacity") {
  const double eff = link::cqi_efficiency(3);
  int prev = 0;
  for (int users = 0; users <= 24; ++users) {
    const int n = required_subframes(2400, users, 25, 102, eff, 100);
    CHECK(n >= prev);
    // Smallest count that covers the demand.
    const double demand = 2400.0 * users / 10.0;
    CHECK(n * 25 * 102 * eff >= demand - 1e-6);
    if (n > 0) {
      CHECK((n - 1) * 25 * 102 * eff < demand);
    }
    prev = n;
  }
  for (int rb : {25, 50, 75, 100}) {
    CHECK(required_subframes(2400, 24, rb, 102, eff, 100) >=
          required_subframes(2400, 24, rb + 25, 102, eff, 100));
  }
}

TEST_CASE("frame plan") {
  const auto p6 = make_frame_plan(6, 25, 102);
  CHECK(p6.reserved_subframes == std::vector<int>{1, 2, 3, 6, 7, 8});
  const auto p2 = make_frame_plan(2, 100, 102);
  CHECK(p2.reserved_subframes == std::vector<int>{1, 6});
  CHECK(p2.is_reserved(11));
  CHECK(p2.is_reserved(16));
  CHECK_FALSE(p2.is_reserved(10));
  CHECK_FALSE(p6.is_reserved(5));
  CHECK_FALSE(p6.is_reserved(9));
  CHECK(make_frame_plan(0, 25, 102).reserved_subframes.empty());
  CHECK_THROWS_AS(make_frame_plan(7, 25, 102), ConfigError);
  for (int n = 0; n <= 6; ++n) {
    for (int sf : make_frame_plan(n, 25, 102).reserved_subframes) {
      CHECK(sf != 0);
      CHECK(sf != 4);
      CHECK(sf != 5);
      CHECK(sf != 9);
    }
  }
}

TEST_CASE("resource block arithmetic") {
  CHECK(resource_blocks_needed(2400, 120, 0.377) == 54);
  CHECK(static_cast<int>(std::ceil(2400 / (120 * 0.377))) == 54);
  CHECK(bits_carried(25, 120, 0.377) == 1131);
  CHECK(bits_carried(0, 120, 0.377) == 0);
  CHECK(resource_blocks_needed(0, 120, 0.377) == 0);
  for (std::int64_t bits : {1, 45, 46, 1000, 2400, 9999}) {
    const int k = resource_blocks_needed(bits, 102, 0.377);
    CHECK(bits_carried(k, 102, 0.377) >= bits);
    CHECK(bits_carried(k - 1, 102, 0.377) < bits);
  }
}

TEST_CASE("multicast subframe scheduling") {
  const auto plan = make_frame_plan(6, 25, 102);
  const double eff = 0.377;
  CHECK_THROWS_AS(schedule_multicast({}, plan, eff, 4), SchedulingError);

  const auto empty = schedule_multicast({}, plan, eff, 1);
  CHECK(empty.reassignable);
  CHECK(empty.used_rbs == 0);
  CHECK(empty.allocations.empty());

  const std::int64_t cap = bits_carried(25, 102, eff);
  const std::vector<PendingCam> two{{8, 50, cap / 2}, {3, 40, cap}};
  const auto s = schedule_multicast(two, plan, eff, 1);
  CHECK_FALSE(s.reassignable);
  // The older CAM fills the subframe; the other one waits.
  REQUIRE(s.allocations.size() == 1);
  CHECK(s.allocations[0].source == 3);
  CHECK(s.allocations[0].bits == cap);
  CHECK(s.allocations[0].rb_count == 25);
  CHECK(s.used_rbs == 25);

  const std::vector<PendingCam> half{{3, 40, cap / 2}, {8, 50, cap}};
  const auto h = schedule_multicast(half, plan, eff, 2);
  REQUIRE(h.allocations.size() == 2);
  CHECK(h.allocations[0].bits == cap / 2);
  CHECK(h.allocations[1].rb_start == h.allocations[0].rb_count);
  CHECK(h.allocations[1].bits > 0);
  CHECK(h.allocations[1].bits < cap);
  CHECK(h.used_rbs == 25);

  const std::vector<PendingCam> ties{{9, 10, 100}, {2, 10, 100}, {5, 0, 0}};
  const auto t = schedule_multicast(ties, plan, eff, 3);
  REQUIRE(t.allocations.size() == 2);
  CHECK(t.allocations[0].source == 2);
  CHECK(t.allocations[1].source == 9);
  CHECK(t.used_rbs == 6);
}

TEST_CASE("ordinary round robin conserves resources") {
  std::vector<OrdinaryUser> users;
  for (int u = 0; u < 7; ++u) {
    users.push_back({u, u < 3 ? 0 : 1, 1 + u});
  }
  const std::vector<CellResources> res{{0, 0, 25}, {1, 10, 15}, {2, 0, 25}};
  std::map<int, int> totals;
  for (int tti = 0; tti < 12; ++tti) {
    const auto a = schedule_unicast_ordinary(users, res, 120, tti);
    CHECK(a.size() == users.size());
    std::map<int, int> per_cell;
    for (const auto& x : a) {
      per_cell[x.cell] += x.rb_count;
      totals[x.user_id] += x.rb_count;
      CHECK(x.bits == bits_carried(x.rb_count, 120, link::cqi_efficiency(x.cqi)));
    }
    CHECK(per_cell[0] == 25);
    CHECK(per_cell[1] == 15);
  }
  // Remainders rotate so that shares even out over whole cycles.
  CHECK(totals[0] == totals[1]);
  CHECK(totals[3] == totals[6]);

  const std::vector<OrdinaryUser> one{{0, 0, 3}};
  const std::vector<CellResources> full{{0, 0, 25}};
  const auto single = schedule_unicast_ordinary(one, full, 120, 0);
  REQUIRE(single.size() == 1);
  CHECK(single[0].bits == 1131);
  const std::vector<CellResources> none{{0, 0, 0}};
  const auto starved = schedule_unicast_ordinary(users, none, 120, 0);
  for (const auto& x : starved) {
    CHECK(x.bits == 0);
  }
}

TEST_CASE("unicast CAM deliveries") {
  const std::vector<Receiver> rx{{1, 0, 3}, {2, 0, 3}, {3, 1, 5}};
  const auto d = expand_unicast_deliveries(2, 7, 2400, rx);
  REQUIRE(d.size() == 2);
  CHECK(d[0].receiver == 1);
  CHECK(d[1].receiver == 3);
  CHECK(d[1].cqi == 5);

  std::vector<Delivery> pending = d;
  pending.push_back({4, 1, 0, 3, 2400, 3});
  const std::vector<int> cells{0, 1, 2};
  const auto s = schedule_unicast_cam_baseline(pending, cells, 25, 102, 0);
  REQUIRE(s.leftover.size() == 3);
  // Cell 0 has the older CAM of source 4 first; it takes the whole cell.
  REQUIRE_FALSE(s.allocations.empty());
  CHECK(s.allocations[0].delivery == 2);
  CHECK(s.allocations[0].rb_count == 25);
  CHECK(s.leftover[0].rb_count == 0);
  CHECK(s.leftover[2].rb_count == 25);
  int cell1 = 0;
  for (const auto& a : s.allocations) {
    if (a.cell == 1) {
      cell1 += a.rb_count;
      CHECK(a.bits == bits_carried(a.rb_count, 102, link::cqi_efficiency(5)));
    }
  }
  CHECK(cell1 + s.leftover[1].rb_count == 25);
  CHECK(s.leftover[1].rb_start == cell1);
}
