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

#include "v2xcast/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "v2xcast/errors.hpp"

namespace v2xcast::metrics {

LatencyEntry close_packet(int source, int sequence, int generation_tti, int delivery_tti,
                          int k_losses) {
  if (delivery_tti < generation_tti) {
    throw InternalError("packet " + std::to_string(sequence) + " of user " +
                        std::to_string(source) + " delivered at " + std::to_string(delivery_tti) +
                        " before its generation at " + std::to_string(generation_tti));
  }
  if (k_losses < 0) {
    throw InternalError("negative loss count");
  }
  return {delivery_tti - generation_tti, k_losses, false};
}

LatencyMatrix::LatencyMatrix(std::vector<int> user_ids) {
  columns_.reserve(user_ids.size());
  for (int id : user_ids) {
    columns_.push_back({id, {}});
  }
}

LatencyMatrix LatencyMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  LatencyMatrix m(ids);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (rows[s].size() != n) {
      throw ContractError("latency rows differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      m.set(i, s, {static_cast<int>(std::lround(rows[s][i])), 0, false});
    }
  }
  return m;
}

void LatencyMatrix::set(std::size_t column, std::size_t sequence, LatencyEntry entry) {
  auto& entries = columns_.at(column).entries;
  if (entries.size() <= sequence) {
    entries.resize(sequence + 1);
  }
  entries[sequence] = entry;
}

void LatencyMatrix::append_columns(const LatencyMatrix& other) {
  columns_.insert(columns_.end(), other.columns_.begin(), other.columns_.end());
}

void LatencyMatrix::truncate(std::size_t packets) {
  for (auto& c : columns_) {
    if (c.entries.size() > packets) {
      c.entries.resize(packets);
    }
  }
}

std::size_t LatencyMatrix::packets() const {
  std::size_t n = 0;
  for (const auto& c : columns_) {
    n = std::max(n, c.entries.size());
  }
  return n;
}

bool LatencyMatrix::rectangular() const {
  return std::all_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.entries.size() == packets(); });
}

std::vector<double> LatencyMatrix::column_values(std::size_t column) const {
  const auto& entries = columns_.at(column).entries;
  std::vector<double> v;
  v.reserve(entries.size());
  for (const auto& e : entries) {
    v.push_back(e.latency_tti);
  }
  return v;
}

std::vector<double> LatencyMatrix::flatten() const {
  std::vector<double> v;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto col = column_values(i);
    v.insert(v.end(), col.begin(), col.end());
  }
  return v;
}

std::size_t LatencyMatrix::censored_count() const {
  std::size_t n = 0;
  for (const auto& c : columns_) {
    n += static_cast<std::size_t>(
        std::count_if(c.entries.begin(), c.entries.end(), [](const auto& e) { return e.censored; }));
  }
  return n;
}

double EcdfCurve::operator()(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  if (it == values.begin()) {
    return 0.0;
  }
  return probabilities[static_cast<std::size_t>(it - values.begin()) - 1];
}

double EcdfCurve::mean() const {
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    sum += values[k] * (probabilities[k] - prev);
    prev = probabilities[k];
  }
  return sum;
}

EcdfCurve ecdf(std::span<const double> samples) {
  if (samples.empty()) {
    throw ContractError("empirical CDF of an empty sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  EcdfCurve c;
  c.samples = sorted.size();
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k + 1 < sorted.size() && sorted[k + 1] == sorted[k]) {
      continue;
    }
    c.values.push_back(sorted[k]);
    c.probabilities.push_back(static_cast<double>(k + 1) / n);
  }
  return c;
}

EcdfCurve cdf_combined(const LatencyMatrix& latency) {
  const auto flat = latency.flatten();
  return ecdf(flat);
}

std::vector<double> column_means(const LatencyMatrix& latency) {
  std::vector<double> means;
  means.reserve(latency.users());
  for (std::size_t i = 0; i < latency.users(); ++i) {
    const auto col = latency.column_values(i);
    if (col.empty()) {
      continue;
    }
    means.push_back(std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size()));
  }
  return means;
}

EcdfCurve cdf_mean(const LatencyMatrix& latency) {
  const auto means = column_means(latency);
  return ecdf(means);
}

std::vector<EcdfCurve> cdf_individual(const LatencyMatrix& latency) {
  std::vector<EcdfCurve> curves;
  curves.reserve(latency.users());
  for (std::size_t i = 0; i < latency.users(); ++i) {
    const auto col = latency.column_values(i);
    curves.push_back(ecdf(col));
  }
  return curves;
}

double utilization(std::int64_t packet_bits, int n_mbms_users, std::int64_t n_rb, int n_re,
                   double efficiency) {
  const double denominator = static_cast<double>(n_rb) * n_re * efficiency;
  if (!(denominator > 0.0)) {
    throw ContractError("utilization needs a positive resource denominator");
  }
  return static_cast<double>(packet_bits) * n_mbms_users / denominator * 100.0;
}

double predicted_throughput_ratio(double util_a, double rb_a, double util_b, double rb_b) {
  for (double u : {util_a, util_b}) {
    if (!(u >= 0.0 && u < 1.0)) {
      throw ContractError("utilization " + format_number(u) +
                          " leaves no resources for ordinary users");
    }
  }
  if (!(rb_a > 0.0 && rb_b > 0.0)) {
    throw ContractError("resource block counts must be positive");
  }
  return ((1.0 - util_b) * rb_b) / ((1.0 - util_a) * rb_a);
}

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

}  // namespace

void write_ecdf_csv(const std::filesystem::path& path, const EcdfCurve& curve,
                    const std::string& value_column) {
  auto out = open_csv(path);
  out << value_column << ",cdf\n";
  for (std::size_t k = 0; k < curve.values.size(); ++k) {
    out << format_number(curve.values[k]) << ',' << format_number(curve.probabilities[k]) << '\n';
  }
}

void write_ecdf_overlay(const std::filesystem::path& path, const std::string& value_column,
                        const std::vector<std::pair<std::string, EcdfCurve>>& curves) {
  std::set<double> grid;
  for (const auto& [name, curve] : curves) {
    grid.insert(curve.values.begin(), curve.values.end());
  }
  auto out = open_csv(path);
  out << value_column;
  for (const auto& [name, curve] : curves) {
    out << ',' << name;
  }
  out << '\n';
  for (double x : grid) {
    out << format_number(x);
    for (const auto& [name, curve] : curves) {
      out << ',' << format_number(curve(x));
    }
    out << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  auto out = open_csv(path);
  out << "mode,bandwidth,cqi_policy,mean_latency_tti,mean_throughput_mbps,utilization_pct,"
         "analytic_utilization_pct,congested,censored_entries\n";
  for (const auto& r : rows) {
    out << r.mode << ',' << r.bandwidth_mhz << ',' << r.cqi_policy << ','
        << format_number(r.mean_latency_tti) << ',' << format_number(r.mean_throughput_mbps) << ','
        << format_number(r.utilization_pct) << ',' << format_number(r.analytic_utilization_pct)
        << ',' << (r.congested ? "true" : "false") << ',' << r.censored_entries << '\n';
  }
}

}  // namespace v2xcast::metrics
