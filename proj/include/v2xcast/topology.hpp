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

// Hexagonal site layout, user drop and vehicle mobility.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace v2xcast::topology {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
  double norm() const { return std::hypot(x, y); }
};

/// Axial coordinates on the hexagonal site lattice.
struct HexCoord {
  int q = 0;
  int r = 0;

  friend bool operator==(HexCoord a, HexCoord b) = default;
  /// Number of hops to the origin site.
  int ring() const;
};

struct Cell {
  int id = 0;
  HexCoord hex;
  Vec2 position;
};

class CellLayout {
 public:
  CellLayout(std::vector<Cell> cells, int mbsfn_rings, int total_rings,
             double inter_site_distance);

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  const Cell& cell(int id) const { return cells_.at(static_cast<std::size_t>(id)); }

  /// Cell ids of the MBSFN area, ascending.
  const std::vector<int>& mbsfn_set() const { return mbsfn_set_; }
  bool is_mbsfn(int cell_id) const;

  double inter_site_distance() const { return isd_; }
  int mbsfn_rings() const { return mbsfn_rings_; }
  int total_rings() const { return total_rings_; }

  /// Site lattice point whose hexagon contains `p` (may lie outside the layout).
  HexCoord hex_at(Vec2 p) const;
  Vec2 hex_center(HexCoord h) const;
  /// Id of the cell whose hexagon contains `p`, or -1 when outside the layout.
  int cell_at(Vec2 p) const;
  bool contains(Vec2 p) const { return cell_at(p) >= 0; }
  /// Maps a point outside the layout back inside by a cluster translation.
  Vec2 wrap(Vec2 p) const;

 private:
  std::vector<Cell> cells_;
  std::vector<int> mbsfn_set_;
  std::vector<bool> mbsfn_flag_;
  int mbsfn_rings_;
  int total_rings_;
  double isd_;
};

/// Cells within `n_mbsfn_rings` hops of the origin form the MBSFN area; the
/// next `n_interference_rings` rings only interfere.
CellLayout build_layout(int n_mbsfn_rings, int n_interference_rings,
                        double inter_site_distance);

enum class UserKind { car, ordinary };

struct User {
  int id = 0;
  UserKind kind = UserKind::ordinary;
  int serving_cell = 0;
  /// Cell the user was dropped in.
  int home_cell = 0;
  Vec2 position;
  Vec2 velocity;

  bool is_car() const { return kind == UserKind::car; }
  friend bool operator==(const User&, const User&) = default;
};

struct UserPopulation {
  std::vector<User> users;

  std::size_t size() const { return users.size(); }
  friend bool operator==(const UserPopulation&, const UserPopulation&) = default;
};

UserPopulation drop_users(const CellLayout& layout, int n_users_per_cell,
                          int n_cars_per_cell, double car_speed_mps,
                          std::uint64_t seed);

/// Picks the serving cell for a car at a new position.
using ServingSelector = std::function<int(const User&, Vec2)>;

/// Moves cars by `velocity * dt`, wraps them at the layout boundary and
/// re-selects their serving cell. Without a selector the nearest site wins,
/// which is the strongest cell under distance-only pathloss.
UserPopulation advance_mobility(const CellLayout& layout, const UserPopulation& pop,
                                double dt, const ServingSelector& select = {});

}  // namespace v2xcast::topology
