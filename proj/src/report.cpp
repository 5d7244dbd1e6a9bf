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

#include "v2xcast/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "v2xcast/errors.hpp"
#include "v2xcast/scenario.hpp"

namespace v2xcast::report {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << text;
}

std::vector<double> throughput_values(const engine::ReplicateResult& result) {
  std::vector<double> v;
  for (const auto& t : result.throughput) {
    v.push_back(t.mbps);
  }
  return v;
}

metrics::EcdfCurve or_empty(const std::vector<double>& v) {
  return v.empty() ? metrics::EcdfCurve{} : metrics::ecdf(v);
}

}  // namespace

std::string manifest(const engine::ScenarioConfig& cfg, const engine::ReplicateResult& result) {
  std::ostringstream os;
  os << "config_hash: " << scenario::config_hash(cfg) << "\n"
     << "seed: " << cfg.seed << "\n"
     << "replicates:\n";
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const auto& r = result.runs[k];
    os << "  - {index: " << k << ", seed: " << r.seed << ", reserved_subframes: "
       << r.reserved_subframes << ", reservation_infeasible: "
       << (r.reservation_infeasible ? "true" : "false") << "}\n";
  }
  os << "config:\n";
  std::istringstream body(scenario::serialize_scenario(cfg));
  for (std::string line; std::getline(body, line);) {
    os << "  " << line << "\n";
  }
  return os.str();
}

void write_run(const fs::path& out, const engine::ScenarioConfig& cfg,
               const engine::ReplicateResult& result) {
  fs::create_directories(out);
  const auto flat = result.latency.flatten();
  metrics::write_ecdf_csv(out / "latency_combined.csv", or_empty(flat), "latency_tti");
  metrics::write_ecdf_csv(out / "latency_mean.csv", or_empty(metrics::column_means(result.latency)),
                          "latency_tti");
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const auto& lat = result.runs[k].latency;
    for (std::size_t c = 0; c < lat.users(); ++c) {
      const auto name = "latency_user_" + std::to_string(k) + "-" +
                        std::to_string(lat.columns()[c].user_id) + ".csv";
      metrics::write_ecdf_csv(out / name, or_empty(lat.column_values(c)), "latency_tti");
    }
  }
  metrics::write_ecdf_csv(out / "throughput_ordinary.csv", or_empty(throughput_values(result)),
                          "throughput_mbps");
  const std::vector<metrics::SummaryRow> rows{result.summary};
  metrics::write_summary_csv(out / "summary.csv", rows);

  std::ostringstream reps;
  reps << "replicate,seed,mean_latency_tti,mean_throughput_mbps,utilization_pct,congested\n";
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const auto& s = result.runs[k].summary;
    reps << k << ',' << result.runs[k].seed << ',' << metrics::format_number(s.mean_latency_tti)
         << ',' << metrics::format_number(s.mean_throughput_mbps) << ','
         << metrics::format_number(s.utilization_pct) << ',' << (s.congested ? "true" : "false")
         << '\n';
  }
  write_text(out / "replicates.csv", reps.str());
  write_text(out / "run_manifest.yaml", manifest(cfg, result));
}

std::string MatrixCell::label() const {
  return engine::to_string(mode) + "_" + std::to_string(bandwidth_mhz) + "mhz_" +
         cqi_policy.label();
}

std::vector<MatrixCell> expand_matrix(const std::vector<engine::TransmissionMode>& modes,
                                      const std::vector<int>& bandwidths,
                                      const std::vector<scheduler::CqiPolicy>& policies) {
  std::vector<MatrixCell> cells;
  for (auto m : modes) {
    for (int bw : bandwidths) {
      for (const auto& p : policies) {
        cells.push_back({m, bw, p});
      }
    }
  }
  return cells;
}

std::vector<BandwidthPair> bandwidth_pairs(const std::vector<metrics::SummaryRow>& rows) {
  std::vector<BandwidthPair> out;
  for (const auto& a : rows) {
    for (const auto& b : rows) {
      if (a.mode != b.mode || a.cqi_policy != b.cqi_policy || a.bandwidth_mhz >= b.bandwidth_mhz) {
        continue;
      }
      BandwidthPair p{a.mode, a.cqi_policy, a.bandwidth_mhz, b.bandwidth_mhz, std::nan(""),
                      b.mean_throughput_mbps / a.mean_throughput_mbps};
      const double ua = a.analytic_utilization_pct / 100.0;
      const double ub = b.analytic_utilization_pct / 100.0;
      if (ua >= 0.0 && ua < 1.0 && ub >= 0.0 && ub < 1.0) {
        p.predicted_ratio = metrics::predicted_throughput_ratio(
            ua, scheduler::resource_blocks_for_bandwidth(a.bandwidth_mhz), ub,
            scheduler::resource_blocks_for_bandwidth(b.bandwidth_mhz));
      }
      out.push_back(p);
    }
  }
  return out;
}

CompareResult compare(const fs::path& out, const engine::ScenarioConfig& base,
                      const std::vector<MatrixCell>& cells, int workers) {
  if (cells.size() < 2) {
    throw ConfigError("compare needs at least two matrix cells");
  }
  fs::create_directories(out);
  CompareResult res;
  std::vector<std::pair<std::string, metrics::EcdfCurve>> combined;
  std::vector<std::pair<std::string, metrics::EcdfCurve>> means;
  std::vector<std::pair<std::string, metrics::EcdfCurve>> throughput;
  for (const auto& cell : cells) {
    engine::ScenarioConfig cfg = base;
    cfg.mode = cell.mode;
    cfg.bandwidth_mhz = cell.bandwidth_mhz;
    cfg.cqi_policy = cell.cqi_policy;
    const auto result = engine::replicate(cfg, cfg.replications, workers);
    write_run(out / cell.label(), cfg, result);
    res.rows.push_back(result.summary);
    combined.emplace_back(cell.label(), or_empty(result.latency.flatten()));
    means.emplace_back(cell.label(), or_empty(metrics::column_means(result.latency)));
    throughput.emplace_back(cell.label(), or_empty(throughput_values(result)));
  }
  metrics::write_summary_csv(out / "summary.csv", res.rows);
  metrics::write_ecdf_overlay(out / "overlay_latency_combined.csv", "latency_tti", combined);
  metrics::write_ecdf_overlay(out / "overlay_latency_mean.csv", "latency_tti", means);
  metrics::write_ecdf_overlay(out / "overlay_throughput_ordinary.csv", "throughput_mbps",
                              throughput);

  res.scaling = bandwidth_pairs(res.rows);
  std::ostringstream os;
  os << "mode,cqi_policy,bandwidth_a,bandwidth_b,predicted_ratio,measured_ratio\n";
  for (const auto& p : res.scaling) {
    os << p.mode << ',' << p.cqi_policy << ',' << p.bandwidth_a << ',' << p.bandwidth_b << ','
       << metrics::format_number(p.predicted_ratio) << ','
       << metrics::format_number(p.measured_ratio) << '\n';
  }
  write_text(out / "bandwidth_scaling.csv", os.str());
  return res;
}

}  // namespace v2xcast::report
