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

#include "v2xcast/link.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "v2xcast/errors.hpp"

namespace v2xcast::link {

namespace {

constexpr double kTableMinDb = -30.0;
constexpr double kTableMaxDb = 50.0;
constexpr double kTableStepDb = 0.1;
constexpr int kQuadratureNodes = 201;
constexpr double kQuadratureSpan = 8.0;

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) {
    m = std::max(m, x);
  }
  double s = 0.0;
  for (double x : v) {
    s += std::exp(x - m);
  }
  return m + std::log(s);
}

struct InformationTable {
  std::vector<double> values;  // per-bit information on the dB grid

  double at_db(double db) const {
    const double pos = (std::clamp(db, kTableMinDb, kTableMaxDb) - kTableMinDb) / kTableStepDb;
    const auto lo = std::min(static_cast<std::size_t>(pos), values.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  }

  double inverse_db(double info) const {
    if (info <= values.front()) {
      return kTableMinDb;
    }
    if (info >= values.back()) {
      // First grid point of the saturated plateau.
      const auto it = std::lower_bound(values.begin(), values.end(), values.back());
      return kTableMinDb + kTableStepDb * static_cast<double>(it - values.begin());
    }
    const auto it = std::lower_bound(values.begin(), values.end(), info);
    const auto hi = static_cast<std::size_t>(it - values.begin());
    const std::size_t lo = hi - 1;
    const double span = values[hi] - values[lo];
    const double frac = span > 0.0 ? (info - values[lo]) / span : 0.0;
    return kTableMinDb + kTableStepDb * (static_cast<double>(lo) + frac);
  }
};

int modulation_slot(int modulation_bits) {
  switch (modulation_bits) {
    case 2:
      return 0;
    case 4:
      return 1;
    case 6:
      return 2;
    default:
      throw ContractError("unsupported modulation order " + std::to_string(modulation_bits));
  }
}

const InformationTable& information_table(int modulation_bits) {
  static const std::array<InformationTable, 3> tables = [] {
    std::array<InformationTable, 3> t;
    const auto n = static_cast<std::size_t>(std::lround((kTableMaxDb - kTableMinDb) / kTableStepDb)) + 1;
    for (int slot = 0; slot < 3; ++slot) {
      const int m = 2 * (slot + 1);
      t[static_cast<std::size_t>(slot)].values.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double db = kTableMinDb + kTableStepDb * static_cast<double>(i);
        t[static_cast<std::size_t>(slot)].values[i] =
            bicm_information_exact(std::pow(10.0, db / 10.0), m);
      }
      // Quadrature noise must not break monotonicity of the inversion.
      auto& v = t[static_cast<std::size_t>(slot)].values;
      for (std::size_t i = 1; i < v.size(); ++i) {
        v[i] = std::max(v[i], v[i - 1]);
      }
    }
    return t;
  }();
  return tables[static_cast<std::size_t>(modulation_slot(modulation_bits))];
}

}  // namespace

CqiTable::CqiTable(std::vector<CqiEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw ConfigError("CQI table is empty");
  }
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.index != static_cast<int>(k) + 1) {
      throw ConfigError("CQI table entries must be numbered 1.." +
                        std::to_string(entries_.size()));
    }
    modulation_slot(e.modulation_bits);
    if (!(e.efficiency > 0.0)) {
      throw ConfigError("CQI " + std::to_string(e.index) + " has non-positive efficiency");
    }
    if (k > 0 && !(e.efficiency > entries_[k - 1].efficiency)) {
      throw ConfigError("CQI efficiencies must be strictly increasing");
    }
    if (k > 0 && !(e.threshold_db > entries_[k - 1].threshold_db)) {
      throw ConfigError("CQI thresholds must be strictly increasing");
    }
  }
}

const CqiEntry& CqiTable::entry(int cqi) const {
  if (cqi < 1 || cqi > max_index()) {
    throw ContractError("CQI index " + std::to_string(cqi) + " outside 1.." +
                        std::to_string(max_index()));
  }
  return entries_[static_cast<std::size_t>(cqi - 1)];
}

const CqiTable& default_cqi_table() {
  static const CqiTable table({
      {1, 2, 0.1523, -6.7},  {2, 2, 0.2344, -4.7},  {3, 2, 0.3770, -2.3},
      {4, 2, 0.6016, 0.2},   {5, 2, 0.8770, 2.4},   {6, 2, 1.1758, 4.3},
      {7, 4, 1.4766, 5.9},   {8, 4, 1.9141, 8.1},   {9, 4, 2.4063, 10.3},
      {10, 6, 2.7305, 11.7}, {11, 6, 3.3223, 14.1}, {12, 6, 3.9023, 16.3},
      {13, 6, 4.5234, 18.7}, {14, 6, 5.1152, 21.0}, {15, 6, 5.5547, 22.7},
  });
  return table;
}

double cqi_efficiency(int cqi, const CqiTable& table) { return table.efficiency(cqi); }

double multicast_interference(const channel::ChannelSnapshot& snap,
                              std::span<const int> mbsfn_set, std::size_t row, std::size_t rb) {
  double interference = 0.0;
  std::size_t next = 0;
  for (std::size_t cell = 0; cell < snap.cells(); ++cell) {
    // mbsfn_set is ascending.
    if (next < mbsfn_set.size() && static_cast<std::size_t>(mbsfn_set[next]) == cell) {
      ++next;
      continue;
    }
    interference += std::norm(snap.at(row, cell, rb));
  }
  return interference;
}

double unicast_interference(const channel::ChannelSnapshot& snap, int serving_cell,
                            std::size_t row, std::size_t rb) {
  double interference = 0.0;
  for (std::size_t cell = 0; cell < snap.cells(); ++cell) {
    if (static_cast<int>(cell) != serving_cell) {
      interference += std::norm(snap.at(row, cell, rb));
    }
  }
  return interference;
}

double sinr_multicast(const channel::ChannelSnapshot& snap, std::span<const int> mbsfn_set,
                      std::size_t row, std::size_t rb) {
  channel::Complex sum{};
  for (int cell : mbsfn_set) {
    sum += snap.at(row, static_cast<std::size_t>(cell), rb);
  }
  return std::norm(sum) /
         (snap.noise_variance() + multicast_interference(snap, mbsfn_set, row, rb));
}

double sinr_unicast(const channel::ChannelSnapshot& snap, int serving_cell, std::size_t row,
                    std::size_t rb) {
  return std::norm(snap.at(row, static_cast<std::size_t>(serving_cell), rb)) /
         (snap.noise_variance() + unicast_interference(snap, serving_cell, row, rb));
}

std::vector<double> sinr_multicast_per_rb(const channel::ChannelSnapshot& snap,
                                          std::span<const int> mbsfn_set, std::size_t row) {
  std::vector<double> out(snap.resource_blocks());
  for (std::size_t rb = 0; rb < out.size(); ++rb) {
    out[rb] = sinr_multicast(snap, mbsfn_set, row, rb);
  }
  return out;
}

std::vector<double> sinr_unicast_per_rb(const channel::ChannelSnapshot& snap, int serving_cell,
                                        std::size_t row) {
  std::vector<double> out(snap.resource_blocks());
  for (std::size_t rb = 0; rb < out.size(); ++rb) {
    out[rb] = sinr_unicast(snap, serving_cell, row, rb);
  }
  return out;
}

double bicm_information_exact(double sinr_linear, int modulation_bits) {
  modulation_slot(modulation_bits);
  if (!(sinr_linear > 0.0)) {
    return 0.0;
  }
  // Gray-mapped square QAM splits into two independent Gray PAMs.
  const int bits = modulation_bits / 2;
  const int levels = 1 << bits;
  const double d = std::sqrt(3.0 / (2.0 * (levels * levels - 1)));
  const double sigma = std::sqrt(1.0 / (2.0 * sinr_linear));

  std::vector<double> amplitude(static_cast<std::size_t>(levels));
  std::vector<int> label(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    amplitude[static_cast<std::size_t>(k)] = (2 * k - levels + 1) * d;
    label[static_cast<std::size_t>(k)] = k ^ (k >> 1);
  }

  const double dt = 2.0 * kQuadratureSpan / (kQuadratureNodes - 1);
  std::vector<double> node(kQuadratureNodes);
  std::vector<double> weight(kQuadratureNodes);
  double wsum = 0.0;
  for (int q = 0; q < kQuadratureNodes; ++q) {
    node[static_cast<std::size_t>(q)] = -kQuadratureSpan + dt * q;
    weight[static_cast<std::size_t>(q)] =
        std::exp(-0.5 * node[static_cast<std::size_t>(q)] * node[static_cast<std::size_t>(q)]);
    wsum += weight[static_cast<std::size_t>(q)];
  }

  std::vector<double> logp(static_cast<std::size_t>(levels));
  std::vector<double> same;
  same.reserve(static_cast<std::size_t>(levels));
  double loss = 0.0;  // expected log-ratio, nats
  for (int k = 0; k < levels; ++k) {
    for (int q = 0; q < kQuadratureNodes; ++q) {
      const double y = amplitude[static_cast<std::size_t>(k)] + sigma * node[static_cast<std::size_t>(q)];
      for (int j = 0; j < levels; ++j) {
        const double e = y - amplitude[static_cast<std::size_t>(j)];
        logp[static_cast<std::size_t>(j)] = -e * e / (2.0 * sigma * sigma);
      }
      const double all = log_sum_exp(logp);
      double term = 0.0;
      for (int i = 0; i < bits; ++i) {
        const int mask = 1 << i;
        same.clear();
        for (int j = 0; j < levels; ++j) {
          if ((label[static_cast<std::size_t>(j)] & mask) == (label[static_cast<std::size_t>(k)] & mask)) {
            same.push_back(logp[static_cast<std::size_t>(j)]);
          }
        }
        term += all - log_sum_exp(same);
      }
      loss += weight[static_cast<std::size_t>(q)] / wsum * term;
    }
  }
  const double capacity = bits - loss / levels / std::numbers::ln2;
  return std::clamp(capacity / bits, 0.0, 1.0);
}

double bicm_information(double sinr_linear, int modulation_bits) {
  if (!(sinr_linear > 0.0)) {
    return 0.0;
  }
  return information_table(modulation_bits).at_db(10.0 * std::log10(sinr_linear));
}

double bicm_information_inverse_db(double information, int modulation_bits) {
  return information_table(modulation_bits).inverse_db(information);
}

double effective_sinr_db(std::span<const double> sinr_linear, int modulation_bits) {
  if (sinr_linear.empty()) {
    throw ContractError("effective SINR of an empty RB set");
  }
  const auto& table = information_table(modulation_bits);
  double mean = 0.0;
  for (double s : sinr_linear) {
    mean += s > 0.0 ? table.at_db(10.0 * std::log10(s)) : 0.0;
  }
  mean /= static_cast<double>(sinr_linear.size());
  return table.inverse_db(mean);
}

int sinr_to_cqi(std::span<const double> sinr_linear, const CqiTable& table) {
  if (sinr_linear.empty()) {
    throw ContractError("CQI mapping needs at least one SINR value");
  }
  constexpr double kBoundaryTolDb = 1e-9;
  std::array<double, 3> eff{};
  std::array<bool, 3> have{};
  for (int cqi = table.max_index(); cqi >= 2; --cqi) {
    const auto& e = table.entry(cqi);
    const auto slot = static_cast<std::size_t>(modulation_slot(e.modulation_bits));
    if (!have[slot]) {
      eff[slot] = effective_sinr_db(sinr_linear, e.modulation_bits);
      have[slot] = true;
    }
    if (e.threshold_db <= eff[slot] + kBoundaryTolDb) {
      return cqi;
    }
  }
  return 1;
}

double block_error_rate(double effective_sinr_db, double threshold_db, const BlerCurve& curve) {
  const double excess = (effective_sinr_db - threshold_db) / curve.slope_db;
  if (excess > 300.0) {
    return 0.0;
  }
  return 1.0 / (1.0 + 9.0 * std::pow(10.0, excess));
}

bool decode_success(double effective_sinr_db, int cqi, Rng& rng, const CqiTable& table,
                    const BlerCurve& curve) {
  const double bler = block_error_rate(effective_sinr_db, table.threshold_db(cqi), curve);
  return std::generate_canonical<double, 53>(rng) >= bler;
}

}  // namespace v2xcast::link
