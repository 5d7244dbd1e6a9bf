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

// Latency matrix, empirical CDFs, utilization and CSV reports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace v2xcast::metrics {

struct LatencyEntry {
  int latency_tti = 0;
  /// Periods the packet waited in vain before a replacement got through.
  int losses = 0;
  /// The run ended first; latency_tti is a lower bound.
  bool censored = false;

  friend bool operator==(const LatencyEntry&, const LatencyEntry&) = default;
};

/// Latency of packet `sequence` of `source`: delivery minus generation.
/// After `k_losses` replacements this equals t_i + T*k, with t_i measured
/// inside the period of the replacement that was finally delivered.
/// Throws InternalError when delivery precedes generation.
LatencyEntry close_packet(int source, int sequence, int generation_tti, int delivery_tti,
                          int k_losses);

/// L[s][i]: one column per MBMS source user, one row per packet.
class LatencyMatrix {
 public:
  struct Column {
    int user_id = 0;
    std::vector<LatencyEntry> entries;

    friend bool operator==(const Column&, const Column&) = default;
  };

  LatencyMatrix() = default;
  explicit LatencyMatrix(std::vector<int> user_ids);
  /// Builds from row-major values L[s][i]; all rows must have equal length.
  static LatencyMatrix from_rows(const std::vector<std::vector<double>>& rows);

  void set(std::size_t column, std::size_t sequence, LatencyEntry entry);
  void append_columns(const LatencyMatrix& other);
  /// Drops every row at or beyond `packets`.
  void truncate(std::size_t packets);

  std::size_t users() const { return columns_.size(); }
  /// Length of the longest column.
  std::size_t packets() const;
  bool rectangular() const;
  const std::vector<Column>& columns() const { return columns_; }
  std::vector<double> column_values(std::size_t column) const;
  /// Column after column.
  std::vector<double> flatten() const;
  std::size_t censored_count() const;

  friend bool operator==(const LatencyMatrix&, const LatencyMatrix&) = default;

 private:
  std::vector<Column> columns_;
};

/// Right-continuous step function F(x) = #{samples <= x} / N.
struct EcdfCurve {
  /// Distinct sample values, ascending.
  std::vector<double> values;
  /// F at each of `values`; non-decreasing, last is 1.
  std::vector<double> probabilities;
  std::size_t samples = 0;

  double operator()(double x) const;
  double mean() const;
};

/// Throws ContractError on empty input.
EcdfCurve ecdf(std::span<const double> samples);
EcdfCurve cdf_combined(const LatencyMatrix& latency);
std::vector<double> column_means(const LatencyMatrix& latency);
EcdfCurve cdf_mean(const LatencyMatrix& latency);
std::vector<EcdfCurve> cdf_individual(const LatencyMatrix& latency);

/// Share of `n_rb` resource blocks, in percent, that one packet of
/// `packet_bits` from each of `n_mbms_users` needs. Not clamped at 100.
double utilization(std::int64_t packet_bits, int n_mbms_users, std::int64_t n_rb, int n_re,
                   double efficiency);

/// Ratio of RBs left for ordinary users in configuration b over a:
/// ((1 - util_b) * rb_b) / ((1 - util_a) * rb_a), utilizations as fractions.
double predicted_throughput_ratio(double util_a, double rb_a, double util_b, double rb_b);

struct UtilizationReport {
  /// Closed-form reservation demand.
  double analytic_pct = 0.0;
  /// Resources actually withheld from ordinary users.
  double measured_pct = 0.0;

  friend bool operator==(const UtilizationReport&, const UtilizationReport&) = default;
};

struct SummaryRow {
  std::string mode;
  int bandwidth_mhz = 0;
  std::string cqi_policy;
  double mean_latency_tti = 0.0;
  double mean_throughput_mbps = 0.0;
  double utilization_pct = 0.0;
  double analytic_utilization_pct = 0.0;
  bool congested = false;
  std::size_t censored_entries = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

void write_ecdf_csv(const std::filesystem::path& path, const EcdfCurve& curve,
                    const std::string& value_column);
/// Curves evaluated on the union of their abscissae, one column per curve.
void write_ecdf_overlay(const std::filesystem::path& path, const std::string& value_column,
                        const std::vector<std::pair<std::string, EcdfCurve>>& curves);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);

}  // namespace v2xcast::metrics
