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

// Periodic CAM generation and per-user transmit buffers.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace v2xcast::traffic {

struct CamPacket {
  int source = 0;
  int generation_tti = 0;
  std::int64_t size_bits = 0;
  int sequence = 0;

  friend bool operator==(const CamPacket&, const CamPacket&) = default;
};

struct UserBuffer {
  int source = 0;
  /// Generation phase r in [0, period).
  int offset = 0;
  int period = 100;
  std::int64_t packet_bits = 2400;
  /// Bits of the active packet not yet delivered (b_i).
  std::int64_t residual_bits = 0;
  std::optional<CamPacket> active;
  int next_sequence = 0;

  bool pending() const { return residual_bits > 0; }
  friend bool operator==(const UserBuffer&, const UserBuffer&) = default;
};

UserBuffer make_buffer(int source, int offset, int period, std::int64_t packet_bits);

bool is_generation_tti(int offset, int period, int tti);

struct Generation {
  UserBuffer buffer;
  /// Packet created this TTI.
  std::optional<CamPacket> packet;
  /// Undelivered packet that the new one superseded.
  std::optional<CamPacket> replaced;
};

/// Creates a packet when (tti - r) is a multiple of the period. An
/// undelivered predecessor is replaced and its partial progress dropped.
Generation maybe_generate(const UserBuffer& buffer, int tti);

/// Removes `transmitted_bits` from the residual when the block decoded;
/// failed blocks leave the buffer untouched.
UserBuffer consume(const UserBuffer& buffer, std::int64_t transmitted_bits, bool decode_ok);

/// TTIs since the most recent generation instant at or before `tti`, in the
/// closed form of the two-case expression (r < n mod T, r > n mod T).
int ttis_since_generation(int tti, int offset, int period);

/// One uniform phase in [0, period) per source, deterministic per seed.
std::vector<int> draw_offsets(std::span<const int> sources, int period, std::uint64_t seed);

}  // namespace v2xcast::traffic
