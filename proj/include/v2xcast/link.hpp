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

// Link-to-system abstraction: SINR, CQI mapping and block errors.

#pragma once

#include <span>
#include <vector>

#include "v2xcast/channel.hpp"
#include "v2xcast/random.hpp"

namespace v2xcast::link {

struct CqiEntry {
  int index = 0;
  /// Bits per modulation symbol: 2 (QPSK), 4 (16QAM) or 6 (64QAM).
  int modulation_bits = 2;
  /// Bits per resource element.
  double efficiency = 0.0;
  /// Effective SINR at which this CQI reaches 10% BLER.
  double threshold_db = 0.0;

  friend bool operator==(const CqiEntry&, const CqiEntry&) = default;
};

class CqiTable {
 public:
  /// Entries must be indexed 1..N in order with strictly increasing
  /// efficiency and threshold; throws ConfigError otherwise.
  explicit CqiTable(std::vector<CqiEntry> entries);

  int max_index() const { return static_cast<int>(entries_.size()); }
  const CqiEntry& entry(int cqi) const;
  double efficiency(int cqi) const { return entry(cqi).efficiency; }
  double threshold_db(int cqi) const { return entry(cqi).threshold_db; }
  const std::vector<CqiEntry>& entries() const { return entries_; }

  friend bool operator==(const CqiTable&, const CqiTable&) = default;

 private:
  std::vector<CqiEntry> entries_;
};

/// The 15-entry LTE 4-bit CQI table with AWGN 10%-BLER thresholds.
const CqiTable& default_cqi_table();

/// Throws ContractError for an index outside the table.
double cqi_efficiency(int cqi, const CqiTable& table = default_cqi_table());

/// Multicast SINR of one snapshot row on one RB: the MBSFN cells add
/// coherently, every other cell interferes.
double sinr_multicast(const channel::ChannelSnapshot& snap, std::span<const int> mbsfn_set,
                      std::size_t row, std::size_t rb);

/// Unicast SINR: every cell except the serving one interferes.
double sinr_unicast(const channel::ChannelSnapshot& snap, int serving_cell, std::size_t row,
                    std::size_t rb);

/// Interference terms of the two SINR expressions.
double multicast_interference(const channel::ChannelSnapshot& snap,
                              std::span<const int> mbsfn_set, std::size_t row, std::size_t rb);
double unicast_interference(const channel::ChannelSnapshot& snap, int serving_cell,
                            std::size_t row, std::size_t rb);

std::vector<double> sinr_multicast_per_rb(const channel::ChannelSnapshot& snap,
                                          std::span<const int> mbsfn_set, std::size_t row);
std::vector<double> sinr_unicast_per_rb(const channel::ChannelSnapshot& snap, int serving_cell,
                                        std::size_t row);

/// BICM capacity of Gray-mapped square QAM, per coded bit (0..1), evaluated
/// by numerical integration. Slow; used to build the lookup tables.
double bicm_information_exact(double sinr_linear, int modulation_bits);
/// Tabulated version of the above, linear in dB.
double bicm_information(double sinr_linear, int modulation_bits);
/// Inverse of bicm_information, in dB.
double bicm_information_inverse_db(double information, int modulation_bits);

/// Mutual-information effective SINR (dB) of a set of per-RB linear SINRs.
double effective_sinr_db(std::span<const double> sinr_linear, int modulation_bits);

/// Largest CQI whose threshold the effective SINR reaches, at least 1.
int sinr_to_cqi(std::span<const double> sinr_linear,
                const CqiTable& table = default_cqi_table());

struct BlerCurve {
  /// dB of SINR per decade of BLER around the threshold.
  double slope_db = 1.0;
};

/// Logistic block error rate in dB, equal to 0.1 at `threshold_db`.
double block_error_rate(double effective_sinr_db, double threshold_db,
                        const BlerCurve& curve = {});

/// Bernoulli draw against the BLER of `cqi` at `effective_sinr_db`.
bool decode_success(double effective_sinr_db, int cqi, Rng& rng,
                    const CqiTable& table = default_cqi_table(), const BlerCurve& curve = {});

}  // namespace v2xcast::link
