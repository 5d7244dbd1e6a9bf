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

#include "v2xcast/topology.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>

#include "v2xcast/errors.hpp"
#include "v2xcast/random.hpp"

namespace v2xcast::topology {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

HexCoord rotate60(HexCoord h) { return {-h.r, h.q + h.r}; }

HexCoord cube_round(double qf, double rf) {
  const double sf = -qf - rf;
  double q = std::round(qf);
  double r = std::round(rf);
  const double s = std::round(sf);
  const double dq = std::abs(q - qf);
  const double dr = std::abs(r - rf);
  const double ds = std::abs(s - sf);
  if (dq > dr && dq > ds) {
    q = -r - s;
  } else if (dr > ds) {
    r = -q - s;
  }
  return {static_cast<int>(q), static_cast<int>(r)};
}

}  // namespace

int HexCoord::ring() const { return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2; }

CellLayout::CellLayout(std::vector<Cell> cells, int mbsfn_rings, int total_rings,
                       double inter_site_distance)
    : cells_(std::move(cells)),
      mbsfn_flag_(cells_.size(), false),
      mbsfn_rings_(mbsfn_rings),
      total_rings_(total_rings),
      isd_(inter_site_distance) {
  for (const auto& c : cells_) {
    if (c.hex.ring() <= mbsfn_rings_) {
      mbsfn_set_.push_back(c.id);
      mbsfn_flag_[static_cast<std::size_t>(c.id)] = true;
    }
  }
}

bool CellLayout::is_mbsfn(int cell_id) const {
  return cell_id >= 0 && static_cast<std::size_t>(cell_id) < mbsfn_flag_.size() &&
         mbsfn_flag_[static_cast<std::size_t>(cell_id)];
}

HexCoord CellLayout::hex_at(Vec2 p) const {
  const double rf = p.y / (isd_ * kSqrt3 / 2.0);
  const double qf = p.x / isd_ - rf / 2.0;
  return cube_round(qf, rf);
}

Vec2 CellLayout::hex_center(HexCoord h) const {
  return {isd_ * (h.q + h.r / 2.0), isd_ * h.r * kSqrt3 / 2.0};
}

int CellLayout::cell_at(Vec2 p) const {
  const HexCoord h = hex_at(p);
  if (h.ring() > total_rings_) {
    return -1;
  }
  for (const auto& c : cells_) {
    if (c.hex == h) {
      return c.id;
    }
  }
  return -1;
}

Vec2 CellLayout::wrap(Vec2 p) const {
  // A hexagonal cluster of radius R tiles the plane under translations by
  // the axial vector (R + 1, R) and its 60-degree rotations.
  std::array<HexCoord, 6> shifts{};
  shifts[0] = {total_rings_ + 1, total_rings_};
  for (std::size_t k = 1; k < shifts.size(); ++k) {
    shifts[k] = rotate60(shifts[k - 1]);
  }
  for (int guard = 0; guard < 64; ++guard) {
    const HexCoord h = hex_at(p);
    if (h.ring() <= total_rings_) {
      return p;
    }
    // Pick the translation that brings the point closest to the origin.
    const HexCoord* best = &shifts[0];
    int best_ring = HexCoord{h.q - best->q, h.r - best->r}.ring();
    for (const auto& s : shifts) {
      const int ring = HexCoord{h.q - s.q, h.r - s.r}.ring();
      if (ring < best_ring) {
        best_ring = ring;
        best = &s;
      }
    }
    p = p - hex_center(*best);
  }
  throw InternalError("wrap-around did not converge");
}

CellLayout build_layout(int n_mbsfn_rings, int n_interference_rings,
                        double inter_site_distance) {
  if (!(inter_site_distance > 0.0)) {
    throw ConfigError("inter-site distance must be positive, got " +
                      std::to_string(inter_site_distance));
  }
  if (n_mbsfn_rings < 0) {
    throw ConfigError("number of MBSFN rings must be non-negative");
  }
  if (n_interference_rings < 1) {
    throw ConfigError("at least one interference ring is required");
  }
  const int total = n_mbsfn_rings + n_interference_rings;

  std::vector<HexCoord> hexes;
  for (int q = -total; q <= total; ++q) {
    for (int r = -total; r <= total; ++r) {
      const HexCoord h{q, r};
      if (h.ring() <= total) {
        hexes.push_back(h);
      }
    }
  }
  // Ring by ring, counter-clockwise from the positive x axis.
  const auto angle = [](HexCoord h) {
    const double a = std::atan2(h.r * kSqrt3 / 2.0, h.q + h.r / 2.0);
    return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
  };
  std::sort(hexes.begin(), hexes.end(), [&](HexCoord a, HexCoord b) {
    if (a.ring() != b.ring()) {
      return a.ring() < b.ring();
    }
    return angle(a) < angle(b);
  });

  std::vector<Cell> cells;
  cells.reserve(hexes.size());
  for (std::size_t i = 0; i < hexes.size(); ++i) {
    const HexCoord h = hexes[i];
    cells.push_back({static_cast<int>(i), h,
                     {inter_site_distance * (h.q + h.r / 2.0),
                      inter_site_distance * h.r * kSqrt3 / 2.0}});
  }
  return CellLayout(std::move(cells), n_mbsfn_rings, total, inter_site_distance);
}

UserPopulation drop_users(const CellLayout& layout, int n_users_per_cell,
                          int n_cars_per_cell, double car_speed_mps,
                          std::uint64_t seed) {
  if (n_users_per_cell < 0 || n_cars_per_cell < 0) {
    throw ConfigError("user counts must be non-negative");
  }
  if (n_cars_per_cell > n_users_per_cell) {
    throw ConfigError("cars per cell (" + std::to_string(n_cars_per_cell) +
                      ") exceed users per cell (" + std::to_string(n_users_per_cell) + ")");
  }
  if (car_speed_mps < 0.0) {
    throw ConfigError("car speed must be non-negative");
  }

  const double isd = layout.inter_site_distance();
  const double half_width = isd / 2.0;
  const double half_height = isd / kSqrt3;

  UserPopulation pop;
  pop.users.reserve(layout.size() * static_cast<std::size_t>(n_users_per_cell));
  int next_id = 0;
  for (const auto& cell : layout.cells()) {
    Rng rng(stream_seed(seed, {stream::kDrop, static_cast<std::uint64_t>(cell.id)}));
    std::uniform_real_distribution<double> ux(-half_width, half_width);
    std::uniform_real_distribution<double> uy(-half_height, half_height);
    std::uniform_real_distribution<double> heading(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < n_users_per_cell; ++k) {
      Vec2 offset;
      do {
        offset = {ux(rng), uy(rng)};
      } while (layout.hex_at(offset) != HexCoord{0, 0});
      User u;
      u.id = next_id++;
      u.kind = k < n_cars_per_cell ? UserKind::car : UserKind::ordinary;
      u.serving_cell = cell.id;
      u.home_cell = cell.id;
      u.position = cell.position + offset;
      if (u.is_car()) {
        const double a = heading(rng);
        u.velocity = {car_speed_mps * std::cos(a), car_speed_mps * std::sin(a)};
      }
      pop.users.push_back(u);
    }
  }
  return pop;
}

UserPopulation advance_mobility(const CellLayout& layout, const UserPopulation& pop,
                                double dt, const ServingSelector& select) {
  if (dt < 0.0) {
    throw ConfigError("mobility step must be non-negative");
  }
  UserPopulation next = pop;
  if (dt == 0.0) {
    return next;
  }
  for (auto& u : next.users) {
    if (!u.is_car()) {
      continue;
    }
    u.position = layout.wrap(u.position + u.velocity * dt);
    u.serving_cell = select ? select(u, u.position) : layout.cell_at(u.position);
  }
  return next;
}

}  // namespace v2xcast::topology
