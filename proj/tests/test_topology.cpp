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
#include <queue>
#include <random>
#include <set>

#include "v2xcast/channel.hpp"
#include "v2xcast/errors.hpp"
#include "v2xcast/topology.hpp"

using namespace v2xcast;
using namespace v2xcast::topology;

namespace {

// Number of lattice sites within `rings` hops, by breadth-first search over
// the six axial neighbours.
int bfs_site_count(int rings) {
  const int dq[6] = {1, -1, 0, 0, 1, -1};
  const int dr[6] = {0, 0, 1, -1, -1, 1};
  std::set<std::pair<int, int>> seen{{0, 0}};
  std::queue<std::pair<std::pair<int, int>, int>> todo;
  todo.push({{0, 0}, 0});
  while (!todo.empty()) {
    auto [h, d] = todo.front();
    todo.pop();
    if (d == rings) {
      continue;
    }
    for (int k = 0; k < 6; ++k) {
      std::pair<int, int> n{h.first + dq[k], h.second + dr[k]};
      if (seen.insert(n).second) {
        todo.push({n, d + 1});
      }
    }
  }
  return static_cast<int>(seen.size());
}

// Cell containing p: the nearest site, if that site belongs to the layout.
int nearest_site_oracle(const CellLayout& layout, Vec2 p) {
  const double d = layout.inter_site_distance();
  double best = 1e300;
  HexCoord best_h;
  for (int q = -12; q <= 12; ++q) {
    for (int r = -12; r <= 12; ++r) {
      const Vec2 c{d * (q + r / 2.0), d * r * std::sqrt(3.0) / 2.0};
      const double dist = (p - c).norm();
      if (dist < best) {
        best = dist;
        best_h = {q, r};
      }
    }
  }
  for (const auto& c : layout.cells()) {
    if (c.hex == best_h) {
      return c.id;
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("reference layout has a seven-cell MBSFN area inside nineteen cells") {
  const auto layout = build_layout(1, 1, 500.0);
  CHECK(layout.size() == 19);
  CHECK(layout.mbsfn_set() == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
  CHECK(layout.cell(0).position == Vec2{0.0, 0.0});
  for (int id : layout.mbsfn_set()) {
    CHECK(layout.cell(id).hex.ring() <= 1);
  }
  for (const auto& c : layout.cells()) {
    CHECK(layout.is_mbsfn(c.id) == (c.hex.ring() <= 1));
    if (c.id >= 1 && c.id <= 6) {
      CHECK(c.position.norm() == doctest::Approx(500.0));
    }
  }
}

TEST_CASE("layout sizes follow the hexagonal ring count") {
  CHECK(build_layout(0, 1, 500.0).size() == 7);
  CHECK(build_layout(0, 1, 500.0).mbsfn_set().size() == 1);
  const auto two = build_layout(2, 1, 500.0);
  CHECK(two.mbsfn_set().size() == 19);
  CHECK(two.size() == 37);
  for (int m = 0; m <= 3; ++m) {
    for (int i = 1; i <= 3; ++i) {
      const auto layout = build_layout(m, i, 400.0);
      CHECK(static_cast<int>(layout.size()) == bfs_site_count(m + i));
      CHECK(static_cast<int>(layout.mbsfn_set().size()) == bfs_site_count(m));
    }
  }
}

TEST_CASE("every interferer touches the MBSFN area's outer ring") {
  const auto layout = build_layout(1, 1, 500.0);
  for (const auto& c : layout.cells()) {
    if (layout.is_mbsfn(c.id)) {
      continue;
    }
    bool adjacent = false;
    for (int id : layout.mbsfn_set()) {
      adjacent = adjacent || (c.position - layout.cell(id).position).norm() < 500.0 * 1.01;
    }
    CHECK(adjacent);
  }
}

TEST_CASE("invalid layouts are rejected") {
  CHECK_THROWS_AS(build_layout(1, 1, 0.0), ConfigError);
  CHECK_THROWS_AS(build_layout(1, 1, -5.0), ConfigError);
  CHECK_THROWS_AS(build_layout(-1, 1, 500.0), ConfigError);
  CHECK_THROWS_AS(build_layout(1, 0, 500.0), ConfigError);
}

TEST_CASE("point location matches a nearest-site scan") {
  const auto layout = build_layout(1, 1, 500.0);
  for (const auto& c : layout.cells()) {
    CHECK(layout.hex_at(c.position) == c.hex);
    CHECK(layout.cell_at(c.position) == c.id);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2600.0, 2600.0);
  for (int k = 0; k < 5000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    CHECK(layout.cell_at(p) == nearest_site_oracle(layout, p));
  }
}

TEST_CASE("wrap-around maps outside points inside by a cluster translation") {
  const auto layout = build_layout(1, 1, 500.0);
  const int radius = 2;
  const HexCoord t1{radius + 1, radius};
  const HexCoord t2{-t1.r, t1.q + t1.r};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6000.0, 6000.0);
  for (int k = 0; k < 2000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    const Vec2 w = layout.wrap(p);
    REQUIRE(layout.contains(w));
    if (layout.contains(p)) {
      CHECK(w == p);
      continue;
    }
    // The shift is a whole number of cluster translations.
    const HexCoord hp = layout.hex_at(p);
    const HexCoord hw = layout.hex_at(w);
    const int dq = hw.q - hp.q;
    const int dr = hw.r - hp.r;
    const double det = t1.q * t2.r - t1.r * t2.q;
    const double a = (dq * t2.r - dr * t2.q) / det;
    const double b = (t1.q * dr - t1.r * dq) / det;
    CHECK(a == doctest::Approx(std::round(a)));
    CHECK(b == doctest::Approx(std::round(b)));
    const Vec2 shift = layout.hex_center(hw) - layout.hex_center(hp);
    CHECK((p + shift).x == doctest::Approx(w.x));
    CHECK((p + shift).y == doctest::Approx(w.y));
  }
}

TEST_CASE("user drop realizes the per-cell counts") {
  const auto layout = build_layout(1, 1, 500.0);
  const double speed = 100.0 / 3.6;
  const auto pop = drop_users(layout, 6, 3, speed, 1);
  CHECK(pop.size() == 114);
  int cars = 0;
  int area_cars = 0;
  std::map<int, std::pair<int, int>> per_cell;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& u = pop.users[i];
    CHECK(u.id == static_cast<int>(i));
    CHECK(u.serving_cell == u.home_cell);
    CHECK(layout.cell_at(u.position) == u.home_cell);
    auto& c = per_cell[u.home_cell];
    ++c.first;
    if (u.is_car()) {
      ++cars;
      ++c.second;
      area_cars += layout.is_mbsfn(u.home_cell) ? 1 : 0;
      CHECK(u.velocity.norm() == doctest::Approx(speed));
    } else {
      CHECK(u.velocity == Vec2{});
    }
  }
  CHECK(cars == 57);
  CHECK(area_cars == 21);
  CHECK(per_cell.size() == 19);
  for (const auto& [cell, counts] : per_cell) {
    CHECK(counts.first == 6);
    CHECK(counts.second == 3);
  }
}

TEST_CASE("user drop edge cases and determinism") {
  const auto layout = build_layout(1, 1, 500.0);
  const auto still = drop_users(layout, 1, 0, 0.0, 3);
  CHECK(still.size() == 19);
  for (const auto& u : still.users) {
    CHECK_FALSE(u.is_car());
  }
  CHECK(drop_users(layout, 6, 3, 27.78, 5) == drop_users(layout, 6, 3, 27.78, 5));
  CHECK_FALSE(drop_users(layout, 6, 3, 27.78, 5) == drop_users(layout, 6, 3, 27.78, 6));
  CHECK_THROWS_AS(drop_users(layout, 2, 3, 27.78, 5), ConfigError);
}

TEST_CASE("mobility moves cars, keeps static users and wraps at the border") {
  const auto layout = build_layout(1, 1, 500.0);
  UserPopulation pop;
  pop.users.push_back({0, UserKind::car, 0, 0, {0.0, 0.0}, {27.78, 0.0}});
  pop.users.push_back({1, UserKind::ordinary, 1, 1, layout.cell(1).position, {}});
  const auto moved = advance_mobility(layout, pop, 1.0);
  CHECK(moved.users[0].position.x == doctest::Approx(27.78));
  CHECK(moved.users[0].position.y == doctest::Approx(0.0));
  CHECK(moved.users[1] == pop.users[1]);
  CHECK(advance_mobility(layout, pop, 0.0) == pop);
  CHECK_THROWS_AS(advance_mobility(layout, pop, -1.0), ConfigError);

  // Drive a car across the outer boundary for a long while.
  UserPopulation edge;
  edge.users.push_back({0, UserKind::car, 0, 0, {0.0, 0.0}, {27.78, 9.0}});
  for (int step = 0; step < 400; ++step) {
    edge = advance_mobility(layout, edge, 0.5);
    REQUIRE(layout.contains(edge.users[0].position));
    CHECK(edge.users[0].serving_cell == layout.cell_at(edge.users[0].position));
    CHECK(edge.users[0].kind == UserKind::car);
  }
}

TEST_CASE("re-selected serving cell is the strongest by exhaustive gain scan") {
  const auto layout = build_layout(1, 1, 500.0);
  auto pop = drop_users(layout, 6, 3, 100.0 / 3.6, 2);
  channel::ChannelConfig cfg;
  const channel::ChannelState state(layout, pop, cfg, 2);
  const ServingSelector select = [&](const User& u, Vec2 p) {
    return state.strongest_cell(layout, u.id, p);
  };
  for (int step = 0; step < 50; ++step) {
    pop = advance_mobility(layout, pop, 0.2, select);
    for (const auto& u : pop.users) {
      if (!u.is_car()) {
        continue;
      }
      int best = -1;
      double best_db = -1e300;
      for (const auto& c : layout.cells()) {
        const double d = std::max((u.position - c.position).norm(), 35.0);
        const double g = -(128.1 + 37.6 * std::log10(d / 1000.0)) + state.shadowing_db(u.id, c.id);
        if (g > best_db) {
          best_db = g;
          best = c.id;
        }
      }
      CHECK(u.serving_cell == best);
    }
  }
}
