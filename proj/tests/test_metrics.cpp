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

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "v2xcast/errors.hpp"
#include "v2xcast/metrics.hpp"

using namespace v2xcast;
using namespace v2xcast::metrics;

namespace {

double count_le(const std::vector<double>& v, double x) {
  std::size_t n = 0;
  for (double s : v) {
    n += s <= x ? 1 : 0;
  }
  return static_cast<double>(n) / static_cast<double>(v.size());
}

std::vector<std::vector<double>> random_rows(std::uint64_t seed, int rows, int cols) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(1, 400);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(rows),
                                       std::vector<double>(static_cast<std::size_t>(cols)));
  for (auto& r : out) {
    for (auto& v : r) {
      v = d(rng);
    }
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("closing a packet") {
  CHECK(close_packet(3, 1, 107, 121, 0) == LatencyEntry{14, 0, false});
  const auto late = close_packet(3, 1, 107, 107 + 2 * 100 + 14, 2);
  CHECK(late.latency_tti == 214);
  CHECK(late.losses == 2);
  CHECK(late.latency_tti == 14 + 100 * late.losses);
  CHECK_THROWS_AS(close_packet(3, 1, 107, 106, 0), InternalError);
  CHECK_THROWS_AS(close_packet(3, 1, 107, 110, -1), InternalError);
}

TEST_CASE("ECDF small cases") {
  const std::vector<double> one{5.0};
  const auto a = ecdf(one);
  CHECK(a(5.0) == 1.0);
  CHECK(a(4.9) == 0.0);
  const std::vector<double> four{4, 2, 3, 1};
  const auto b = ecdf(four);
  CHECK(b(2.0) == 0.5);
  CHECK(b(0.0) == 0.0);
  CHECK(b(100.0) == 1.0);
  CHECK(b.mean() == doctest::Approx(2.5));
  CHECK_THROWS_AS(ecdf(std::vector<double>{}), ContractError);
}

TEST_CASE("ECDF matches a counting oracle") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(50.0, 20.0);
  std::vector<double> v(1000);
  for (auto& x : v) {
    x = std::round(n(rng) * 4.0) / 4.0;
  }
  const auto c = ecdf(v);
  CHECK(c.samples == 1000);
  CHECK(c.probabilities.back() == 1.0);
  for (std::size_t k = 1; k < c.values.size(); ++k) {
    CHECK(c.values[k] > c.values[k - 1]);
    CHECK(c.probabilities[k] >= c.probabilities[k - 1]);
  }
  std::uniform_real_distribution<double> q(-20.0, 120.0);
  for (int i = 0; i < 100; ++i) {
    const double x = i < 50 ? v[static_cast<std::size_t>(i) * 7] : q(rng);
    CHECK(c(x) == count_le(v, x));
  }
}

TEST_CASE("combined and mean estimators") {
  const auto l = LatencyMatrix::from_rows({{10, 20}, {10, 20}});
  const auto c = cdf_combined(l);
  CHECK(c(10) == 0.5);
  CHECK(c(20) == 1.0);
  const auto m = cdf_mean(LatencyMatrix::from_rows({{10, 20}, {30, 20}}));
  CHECK(m.values == std::vector<double>{20.0});
  CHECK(m.probabilities == std::vector<double>{1.0});
  const auto flat = cdf_combined(LatencyMatrix::from_rows({{7, 7, 7}}));
  CHECK(flat.values == std::vector<double>{7.0});

  const auto single = LatencyMatrix::from_rows({{3, 9, 1, 4}});
  CHECK(cdf_mean(single).values == cdf_combined(single).values);
  CHECK(cdf_mean(single).probabilities == cdf_combined(single).probabilities);
  CHECK_THROWS_AS(LatencyMatrix::from_rows({{1, 2}, {3}}), ContractError);
}

TEST_CASE("estimator identities on random matrices") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rows = random_rows(seed, 50, 20);
    const auto l = LatencyMatrix::from_rows(rows);
    CHECK(l.users() == 20);
    CHECK(l.packets() == 50);
    CHECK(l.rectangular());

    std::vector<double> flat;
    for (std::size_t i = 0; i < 20; ++i) {
      for (const auto& r : rows) {
        flat.push_back(r[i]);
      }
    }
    CHECK(l.flatten() == flat);
    const auto c = cdf_combined(l);
    const auto e = ecdf(flat);
    CHECK(c.values == e.values);
    CHECK(c.probabilities == e.probabilities);
    for (double x = 0; x <= 401; x += 3.5) {
      CHECK(c(x) == count_le(flat, x));
    }

    const double grand = std::accumulate(flat.begin(), flat.end(), 0.0) / flat.size();
    const auto means = column_means(l);
    const double of_means = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
    CHECK(of_means == doctest::Approx(grand).epsilon(1e-12));
    CHECK(cdf_mean(l).mean() == doctest::Approx(grand).epsilon(1e-12));
    CHECK(c.mean() == doctest::Approx(grand).epsilon(1e-12));

    const auto per = cdf_individual(l);
    REQUIRE(per.size() == 20);
    for (double x = 0; x <= 401; x += 7.0) {
      double pooled = 0.0;
      for (const auto& curve : per) {
        pooled += curve(x) * static_cast<double>(curve.samples);
      }
      CHECK(pooled / flat.size() == doctest::Approx(c(x)).epsilon(1e-12));
    }
  }
  const auto same = cdf_individual(LatencyMatrix::from_rows({{1, 1}, {5, 5}}));
  CHECK(same[0].values == same[1].values);
  const auto diff = cdf_individual(LatencyMatrix::from_rows({{1, 2}, {5, 5}}));
  CHECK_FALSE(diff[0].values == diff[1].values);
}

TEST_CASE("latency matrix bookkeeping") {
  LatencyMatrix l({4, 9});
  l.set(0, 0, {12, 0, false});
  l.set(0, 2, {30, 0, true});
  l.set(1, 0, {5, 0, false});
  CHECK(l.packets() == 3);
  CHECK_FALSE(l.rectangular());
  CHECK(l.censored_count() == 1);
  l.truncate(1);
  CHECK(l.rectangular());
  CHECK(l.censored_count() == 0);
  LatencyMatrix other({11});
  other.set(0, 0, {8, 0, false});
  l.append_columns(other);
  CHECK(l.users() == 3);
  CHECK(l.columns()[2].user_id == 11);
  CHECK_THROWS(l.set(5, 0, {}));
}

TEST_CASE("analytic utilization") {
  CHECK(utilization(1000, 2, 20, 1, 100.0) == doctest::Approx(100.0));
  CHECK(utilization(2400, 21, 25 * 60, 102, 0.754) ==
        doctest::Approx(utilization(2400, 21, 25 * 60, 102, 0.377) / 2.0));
  // 21 sources over the 25 x 100 RBs of one generation period.
  CHECK(utilization(2400, 21, 25 * 100, 102, 0.377) == doctest::Approx(52.4).epsilon(2e-3));
  CHECK(utilization(2400, 42, 1500, 102, 0.377) ==
        doctest::Approx(2.0 * utilization(2400, 21, 1500, 102, 0.377)));
  CHECK(utilization(4800, 21, 1500, 102, 0.377) ==
        doctest::Approx(2.0 * utilization(2400, 21, 1500, 102, 0.377)));
  CHECK(utilization(2400, 21, 3000, 102, 0.377) ==
        doctest::Approx(0.5 * utilization(2400, 21, 1500, 102, 0.377)));
  CHECK(utilization(2400, 400, 10, 102, 0.377) > 100.0);
  CHECK_THROWS_AS(utilization(2400, 21, 0, 102, 0.377), ContractError);
}

TEST_CASE("bandwidth scaling predictor") {
  CHECK(predicted_throughput_ratio(0.52, 25, 0.157, 100) == doctest::Approx(7.025));
  CHECK(predicted_throughput_ratio(0.3, 50, 0.3, 50) == doctest::Approx(1.0));
  CHECK(predicted_throughput_ratio(0.0, 25, 0.0, 100) == doctest::Approx(4.0));
  CHECK_THROWS_AS(predicted_throughput_ratio(1.0, 25, 0.1, 100), ContractError);
  CHECK_THROWS_AS(predicted_throughput_ratio(0.1, 25, -0.1, 100), ContractError);
  CHECK_THROWS_AS(predicted_throughput_ratio(0.1, 0, 0.1, 100), ContractError);
}

TEST_CASE("CSV output") {
  const auto dir = std::filesystem::temp_directory_path() / "v2xcast_metrics_test";
  std::filesystem::create_directories(dir);
  const std::vector<double> v{3, 1, 2, 2};
  write_ecdf_csv(dir / "e.csv", ecdf(v), "latency_tti");
  CHECK(slurp(dir / "e.csv") == "latency_tti,cdf\n1,0.25\n2,0.75\n3,1\n");

  const std::vector<double> w{2, 4};
  write_ecdf_overlay(dir / "o.csv", "latency_tti", {{"a", ecdf(v)}, {"b", ecdf(w)}});
  CHECK(slurp(dir / "o.csv") == "latency_tti,a,b\n1,0.25,0\n2,0.75,0.5\n3,1,0.5\n4,1,1\n");

  const std::vector<SummaryRow> rows{{"multicast", 5, "fixed3", 92.5, 1.25, 52.4, 52.4, false, 3}};
  write_summary_csv(dir / "s.csv", rows);
  CHECK(slurp(dir / "s.csv") ==
        "mode,bandwidth,cqi_policy,mean_latency_tti,mean_throughput_mbps,utilization_pct,"
        "analytic_utilization_pct,congested,censored_entries\n"
        "multicast,5,fixed3,92.5,1.25,52.4,52.4,false,3\n");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-7) == "1e-07");
  std::filesystem::remove_all(dir);
}
