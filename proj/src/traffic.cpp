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

#include "v2xcast/traffic.hpp"

#include <algorithm>
#include <random>

#include "v2xcast/errors.hpp"
#include "v2xcast/random.hpp"

namespace v2xcast::traffic {

UserBuffer make_buffer(int source, int offset, int period, std::int64_t packet_bits) {
  if (period < 1) {
    throw ConfigError("generation period must be at least one TTI");
  }
  if (offset < 0 || offset >= period) {
    throw ConfigError("generation offset must lie in [0, period)");
  }
  if (packet_bits < 1) {
    throw ConfigError("packet size must be positive");
  }
  UserBuffer b;
  b.source = source;
  b.offset = offset;
  b.period = period;
  b.packet_bits = packet_bits;
  return b;
}

bool is_generation_tti(int offset, int period, int tti) {
  return tti >= offset && (tti - offset) % period == 0;
}

Generation maybe_generate(const UserBuffer& buffer, int tti) {
  if (tti < 0) {
    throw ContractError("negative TTI");
  }
  Generation g{buffer, std::nullopt, std::nullopt};
  if (!is_generation_tti(buffer.offset, buffer.period, tti)) {
    return g;
  }
  if (buffer.active && buffer.pending()) {
    g.replaced = buffer.active;
  }
  CamPacket p{buffer.source, tti, buffer.packet_bits, buffer.next_sequence};
  g.buffer.active = p;
  g.buffer.residual_bits = buffer.packet_bits;
  g.buffer.next_sequence = buffer.next_sequence + 1;
  g.packet = p;
  return g;
}

UserBuffer consume(const UserBuffer& buffer, std::int64_t transmitted_bits, bool decode_ok) {
  if (transmitted_bits < 0) {
    throw ContractError("negative transmitted bit count");
  }
  UserBuffer b = buffer;
  if (decode_ok) {
    b.residual_bits = std::max<std::int64_t>(b.residual_bits - transmitted_bits, 0);
  }
  return b;
}

int ttis_since_generation(int tti, int offset, int period) {
  const int phase = tti - (tti / period) * period;
  if (offset < phase) {
    return phase - offset;
  }
  if (offset > phase) {
    return tti - (tti / period - 1) * period - offset;
  }
  return 0;
}

std::vector<int> draw_offsets(std::span<const int> sources, int period, std::uint64_t seed) {
  std::vector<int> out;
  out.reserve(sources.size());
  for (int s : sources) {
    Rng rng(stream_seed(seed, {stream::kTraffic, static_cast<std::uint64_t>(s)}));
    std::uniform_int_distribution<int> phase(0, period - 1);
    out.push_back(phase(rng));
  }
  return out;
}

}  // namespace v2xcast::traffic
