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

#include "v2xcast/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <exception>
#include <iostream>
#include <mutex>
#include <numeric>
#include <thread>

#include "v2xcast/channel.hpp"
#include "v2xcast/errors.hpp"
#include "v2xcast/random.hpp"
#include "v2xcast/scenario.hpp"
#include "v2xcast/topology.hpp"
#include "v2xcast/traffic.hpp"

namespace v2xcast::engine {

namespace {

using scheduler::CqiMode;

/// A CAM some intended receiver still lacks. A receiver that decodes any
/// later CAM of the same source is done with this one too.
struct OpenPacket {
  traffic::CamPacket packet;
  std::vector<bool> done;
};

struct Source {
  int user_id = 0;
  std::size_t row = 0;
  /// Bits still to put on air (multicast).
  traffic::UserBuffer buffer;
  /// Residual of every receiver's copy of the newest CAM, indexed like the
  /// source list.
  std::vector<traffic::UserBuffer> copies;
  /// Oldest first; the back is the newest CAM.
  std::deque<OpenPacket> open;

  int origin_tti() const { return open.front().packet.generation_tti; }
};

struct Ordinary {
  int user_id = 0;
  int cell = 0;
  std::size_t row = 0;
  double bits = 0.0;
};

std::uint64_t digest(const channel::ChannelSnapshot& snap) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t row = 0; row < snap.rows(); ++row) {
    for (std::size_t cell = 0; cell < snap.cells(); ++cell) {
      for (const auto& v : snap.response(row, cell)) {
        const double parts[2] = {v.real(), v.imag()};
        unsigned char bytes[sizeof(parts)];
        std::memcpy(bytes, parts, sizeof(parts));
        for (unsigned char b : bytes) {
          h = (h ^ b) * 0x100000001b3ULL;
        }
      }
    }
  }
  return h;
}

channel::ChannelConfig channel_config(const ScenarioConfig& cfg) {
  channel::ChannelConfig c;
  c.carrier_hz = cfg.carrier_ghz * 1e9;
  c.n_rb = cfg.n_rb();
  c.tap_profile = cfg.tap_profile;
  c.shadowing_sigma_db = cfg.shadowing_sigma_db;
  c.pathloss = {cfg.pathloss_intercept_db, cfg.pathloss_slope_db, cfg.min_distance_m};
  c.noise_density_dbm_hz = cfg.noise_density_dbm_hz;
  c.noise_figure_db = cfg.noise_figure_db;
  c.tx_power_per_rb_dbm = cfg.tx_power_per_rb_dbm;
  return c;
}

template <typename T>
std::span<const T> range(const std::vector<T>& v, int start, int count) {
  return {v.data() + start, static_cast<std::size_t>(count)};
}

}  // namespace

std::string to_string(TransmissionMode mode) {
  return mode == TransmissionMode::multicast ? "multicast" : "unicast";
}

TransmissionMode parse_mode(const std::string& text) {
  if (text == "multicast") {
    return TransmissionMode::multicast;
  }
  if (text == "unicast" || text == "unicast_baseline") {
    return TransmissionMode::unicast_baseline;
  }
  throw ConfigError("unknown transmission mode '" + text + "'");
}

void validate(const ScenarioConfig& cfg) {
  const auto require = [](bool ok, const std::string& field, const std::string& rule) {
    if (!ok) {
      throw ConfigError(field + ": " + rule);
    }
  };
  require(cfg.mbsfn_rings >= 0, "layout.mbsfn_rings", "must be >= 0");
  require(cfg.interference_rings >= 1, "layout.interference_rings", "must be >= 1");
  require(cfg.inter_site_distance_m > 0.0, "layout.inter_site_distance_m", "must be > 0");
  require(cfg.users_per_cell >= 0, "users.per_cell", "must be >= 0");
  require(cfg.cars_per_cell >= 0 && cfg.cars_per_cell <= cfg.users_per_cell,
          "users.cars_per_cell", "must be within 0..users.per_cell");
  require(cfg.car_speed_kmh >= 0.0, "users.car_speed_kmh", "must be >= 0");
  cfg.n_rb();
  require(cfg.carrier_ghz > 0.0, "radio.carrier_ghz", "must be > 0");
  require(cfg.n_re_per_rb > 0, "radio.n_re_per_rb", "must be > 0");
  channel::tap_profile(cfg.tap_profile);
  require(cfg.shadowing_sigma_db >= 0.0, "radio.shadowing_sigma_db", "must be >= 0");
  require(cfg.min_distance_m > 0.0, "radio.min_distance_m", "must be > 0");
  require(cfg.bler_slope_db > 0.0, "link.bler_slope_db", "must be > 0");
  require(cfg.feedback_delay_tti >= 0, "link.feedback_delay_tti", "must be >= 0");
  require(cfg.packet_bytes > 0, "traffic.packet_bytes", "must be > 0");
  require(cfg.period_tti > 0, "traffic.period_tti", "must be > 0");
  const int max_cqi = cfg.table().max_index();
  if (cfg.cqi_policy.mode == CqiMode::fixed) {
    require(cfg.cqi_policy.cqi >= 1 && cfg.cqi_policy.cqi <= max_cqi, "scheduling.cqi_policy",
            "fixed CQI outside the table");
  } else {
    require(cfg.cqi_policy.cqi >= 0 && cfg.cqi_policy.cqi <= max_cqi, "scheduling.cqi_policy",
            "CQI bound outside the table");
  }
  require(cfg.reservation_cqi >= 1 && cfg.reservation_cqi <= max_cqi,
          "scheduling.reservation_cqi", "outside the CQI table");
  require(cfg.n_tti >= 0, "simulation.n_tti", "must be >= 0");
  require(cfg.replications >= 1, "simulation.replications", "must be >= 1");
}

int recorded_packets(const ScenarioConfig& cfg) {
  return std::max(0, cfg.n_tti / cfg.period_tti - 1);
}

RunRecord run(const ScenarioConfig& cfg, const RunHooks& hooks) {
  validate(cfg);
  const auto& table = cfg.table();
  const link::BlerCurve bler{cfg.bler_slope_db};
  const int n_rb = cfg.n_rb();
  const int n_re = cfg.n_re_per_rb;
  const int period = cfg.period_tti;
  const std::int64_t packet_bits = cfg.packet_bits();
  const bool multicast = cfg.mode == TransmissionMode::multicast;

  const auto layout =
      topology::build_layout(cfg.mbsfn_rings, cfg.interference_rings, cfg.inter_site_distance_m);
  auto pop = topology::drop_users(layout, cfg.users_per_cell, cfg.cars_per_cell,
                                  cfg.car_speed_kmh / 3.6, cfg.seed);
  const channel::ChannelState chan(layout, pop, channel_config(cfg), cfg.seed);
  const auto& mbsfn = layout.mbsfn_set();
  const auto n_area_cells = static_cast<int>(mbsfn.size());

  RunRecord rec;
  rec.config_hash = scenario::config_hash(cfg);
  rec.seed = cfg.seed;

  // MBMS users are the cars dropped in the MBSFN area; the measured ordinary
  // users are the static users of the same cells.
  std::vector<int> tracked;
  std::vector<int> source_ids;
  for (const auto& u : pop.users) {
    if (!layout.is_mbsfn(u.home_cell)) {
      continue;
    }
    tracked.push_back(u.id);
    if (u.is_car()) {
      source_ids.push_back(u.id);
    }
  }
  rec.mbms_users = source_ids;
  const auto n_sources = source_ids.size();

  const auto offsets = traffic::draw_offsets(source_ids, period, cfg.seed);
  std::vector<Source> sources(n_sources);
  std::vector<Ordinary> ordinary;
  std::vector<Rng> decode_rng;
  for (std::size_t k = 0; k < n_sources; ++k) {
    auto& s = sources[k];
    s.user_id = source_ids[k];
    s.buffer = traffic::make_buffer(s.user_id, offsets[k], period, packet_bits);
    s.copies.assign(n_sources, traffic::make_buffer(s.user_id, offsets[k], period, packet_bits));
    decode_rng.emplace_back(
        stream_seed(cfg.seed, {stream::kDecode, static_cast<std::uint64_t>(s.user_id)}));
  }
  for (std::size_t row = 0; row < tracked.size(); ++row) {
    const auto& u = pop.users[static_cast<std::size_t>(tracked[row])];
    if (u.is_car()) {
      const auto k = static_cast<std::size_t>(
          std::find(source_ids.begin(), source_ids.end(), u.id) - source_ids.begin());
      sources[k].row = row;
    } else {
      ordinary.push_back({u.id, u.serving_cell, row, 0.0});
    }
  }

  std::vector<std::size_t> ordinary_index(pop.users.size(), 0);
  for (std::size_t k = 0; k < ordinary.size(); ++k) {
    ordinary_index[static_cast<std::size_t>(ordinary[k].user_id)] = k;
  }

  // Reservation.
  const double reservation_eff = table.efficiency(cfg.reservation_cqi);
  int reserved = 0;
  if (multicast) {
    try {
      reserved = scheduler::required_subframes(packet_bits, static_cast<int>(n_sources), n_rb,
                                               n_re, reservation_eff, period);
    } catch (const CongestionInfeasible& e) {
      std::clog << "warning: " << e.what() << "; reserving " << scheduler::kMaxMbsfnSubframes
                << " and measuring the backlog\n";
      reserved = scheduler::kMaxMbsfnSubframes;
      rec.reservation_infeasible = true;
    }
    rec.utilization.analytic_pct =
        metrics::utilization(packet_bits, static_cast<int>(n_sources),
                             std::int64_t{n_rb} * period, n_re, reservation_eff);
  } else {
    // Every CAM travels once per receiver over the receivers' cells.
    const auto copies = static_cast<int>(n_sources * (n_sources > 0 ? n_sources - 1 : 0));
    rec.utilization.analytic_pct =
        n_area_cells > 0 ? metrics::utilization(packet_bits, copies,
                                                std::int64_t{n_rb} * period * n_area_cells, n_re,
                                                reservation_eff)
                         : 0.0;
  }
  rec.reserved_subframes = reserved;
  const auto plan = scheduler::make_frame_plan(reserved, n_rb, n_re);

  const auto n_recorded = static_cast<std::size_t>(recorded_packets(cfg));
  rec.latency = metrics::LatencyMatrix(source_ids);

  const auto selector = [&](const topology::User& u, topology::Vec2 p) {
    return chan.strongest_cell(layout, u.id, p);
  };

  std::deque<std::vector<int>> mcast_reports;
  std::deque<std::vector<int>> ucast_reports;
  std::vector<std::vector<double>> mcast_sinr(tracked.size());
  std::vector<std::vector<double>> ucast_sinr(tracked.size());
  std::vector<bool> in_area(n_sources, false);
  std::int64_t withheld_total = 0;
  rec.events.reserve(static_cast<std::size_t>(cfg.n_tti));

  const auto decode = [&](int tti, std::size_t src, std::size_t rcv, double eff_sinr_db,
                          int cqi) {
    if (hooks.decode_override) {
      if (auto forced = hooks.decode_override(tti, sources[src].user_id, sources[rcv].user_id)) {
        return *forced;
      }
    }
    if (cfg.ideal_decoding) {
      return true;
    }
    return link::decode_success(eff_sinr_db, cqi, decode_rng[rcv], table, bler);
  };

  for (int tti = 0; tti < cfg.n_tti; ++tti) {
    if (tti > 0) {
      pop = topology::advance_mobility(layout, pop, 1e-3, selector);
    }
    const auto snap = channel::snapshot(layout, pop, chan, tti, tracked);
    if (hooks.on_channel) {
      hooks.on_channel(tti, digest(snap));
    }

    // Link measurements and CQI feedback.
    std::vector<int> mcast_now(tracked.size(), 1);
    std::vector<int> ucast_now(tracked.size(), 1);
    for (std::size_t row = 0; row < tracked.size(); ++row) {
      const auto& u = pop.users[static_cast<std::size_t>(tracked[row])];
      ucast_sinr[row] = link::sinr_unicast_per_rb(snap, u.serving_cell, row);
      ucast_now[row] = link::sinr_to_cqi(ucast_sinr[row], table);
      if (u.is_car()) {
        mcast_sinr[row] = link::sinr_multicast_per_rb(snap, mbsfn, row);
        mcast_now[row] = link::sinr_to_cqi(mcast_sinr[row], table);
      }
    }
    mcast_reports.push_back(std::move(mcast_now));
    ucast_reports.push_back(std::move(ucast_now));
    while (mcast_reports.size() > static_cast<std::size_t>(cfg.feedback_delay_tti) + 1) {
      mcast_reports.pop_front();
      ucast_reports.pop_front();
    }
    const auto& mcast_cqi = mcast_reports.front();
    const auto& ucast_cqi = ucast_reports.front();

    for (std::size_t k = 0; k < n_sources; ++k) {
      in_area[k] = layout.is_mbsfn(pop.users[static_cast<std::size_t>(sources[k].user_id)].serving_cell);
    }

    const auto receiver_pending = [&](std::size_t src, std::size_t rcv) {
      return rcv != src && in_area[rcv] && sources[src].copies[rcv].pending();
    };

    const auto mark_if_complete = [&](std::size_t src, std::size_t rcv) {
      if (!sources[src].copies[rcv].pending()) {
        for (auto& o : sources[src].open) {
          o.done[rcv] = true;
        }
      }
    };

    // CAM generation. Open packets stay open until their receivers catch up.
    for (std::size_t k = 0; k < n_sources; ++k) {
      auto& s = sources[k];
      auto gen = traffic::maybe_generate(s.buffer, tti);
      if (!gen.packet) {
        continue;
      }
      s.buffer = gen.buffer;
      if (!s.open.empty()) {
        bool unsent = multicast && gen.replaced.has_value();
        for (std::size_t r = 0; r < n_sources && !multicast && !unsent; ++r) {
          unsent = receiver_pending(k, r);
        }
        rec.overruns += unsent ? 1 : 0;
      }
      s.open.push_back({*gen.packet, std::vector<bool>(n_sources, false)});
      s.open.back().done[k] = true;
      for (auto& c : s.copies) {
        c = traffic::maybe_generate(c, tti).buffer;
      }
    }

    TtiEvent ev;
    ev.tti = tti;
    std::vector<scheduler::CellResources> free_rbs;
    std::vector<int> cell_rbs(layout.size(), 0);

    if (multicast) {
      ev.mbsfn_subframe = plan.is_reserved(tti);
      if (ev.mbsfn_subframe) {
        std::vector<scheduler::PendingCam> pending;
        for (std::size_t k = 0; k < n_sources; ++k) {
          const auto& s = sources[k];
          if (s.open.empty()) {
            continue;
          }
          // No feedback exists for MBMS, so only bits never aired are scheduled.
          if (s.buffer.pending()) {
            pending.push_back({s.user_id, s.origin_tti(), s.buffer.residual_bits});
          }
        }

        MulticastTrace trace;
        trace.tti = tti;
        trace.pending = pending;
        if (!pending.empty()) {
          scheduler::CqiState state;
          state.policy = cfg.cqi_policy;
          for (std::size_t k = 0; k < n_sources; ++k) {
            if (in_area[k]) {
              state.cqi_reports.push_back(mcast_cqi[sources[k].row]);
            }
          }
          if (state.policy.mode == CqiMode::adaptive && state.cqi_reports.empty()) {
            state.cqi_reports.push_back(std::max(state.policy.cqi, 1));
          }
          const int cqi = std::max(scheduler::select_mbsfn_cqi(state), 1);
          const int mod = table.entry(cqi).modulation_bits;
          const auto sched = scheduler::schedule_multicast(pending, plan, table.efficiency(cqi), tti);
          // The subframe is one transport block: each receiver decodes it
          // once, over every RB it occupies.
          std::vector<std::size_t> owners;
          for (const auto& a : sched.allocations) {
            owners.push_back(static_cast<std::size_t>(
                std::find(source_ids.begin(), source_ids.end(), a.source) - source_ids.begin()));
          }
          for (std::size_t r = 0; r < n_sources; ++r) {
            bool wanted = false;
            for (auto k : owners) {
              wanted = wanted || receiver_pending(k, r);
            }
            if (!wanted) {
              continue;
            }
            const double eff_db = link::effective_sinr_db(
                range(mcast_sinr[sources[r].row], 0, sched.used_rbs), mod);
            const int first = sched.allocations.front().source;
            const bool ok = decode(tti, static_cast<std::size_t>(
                                            std::find(source_ids.begin(), source_ids.end(), first) -
                                            source_ids.begin()),
                                   r, eff_db, cqi);
            for (std::size_t j = 0; j < owners.size(); ++j) {
              const auto k = owners[j];
              if (receiver_pending(k, r)) {
                auto& copy = sources[k].copies[r];
                copy = traffic::consume(copy, sched.allocations[j].bits, ok);
                mark_if_complete(k, r);
              }
            }
          }
          for (std::size_t j = 0; j < owners.size(); ++j) {
            auto& s = sources[owners[j]];
            s.buffer = traffic::consume(s.buffer, sched.allocations[j].bits, true);
          }
          ev.selected_cqi = cqi;
          ev.cam_rbs = sched.used_rbs * n_area_cells;
          ev.max_cell_rbs = sched.used_rbs;
          trace.selected_cqi = cqi;
          trace.schedule = sched;
        } else {
          trace.schedule.reassignable = true;
        }
        if (hooks.on_multicast) {
          hooks.on_multicast(trace);
        }
        if (pending.empty() && cfg.reassign_unused_subframes) {
          for (int cell : mbsfn) {
            free_rbs.push_back({cell, 0, n_rb});
          }
        } else {
          ev.withheld_rbs = n_rb * n_area_cells;
        }
      } else {
        for (int cell : mbsfn) {
          free_rbs.push_back({cell, 0, n_rb});
        }
      }
    } else {
      std::vector<scheduler::Delivery> deliveries;
      std::vector<std::pair<std::size_t, std::size_t>> owner;  // (source, receiver)
      for (std::size_t k = 0; k < n_sources; ++k) {
        const auto& s = sources[k];
        if (s.open.empty()) {
          continue;
        }
        for (std::size_t r = 0; r < n_sources; ++r) {
          if (!receiver_pending(k, r)) {
            continue;
          }
          const auto& rcv = pop.users[static_cast<std::size_t>(sources[r].user_id)];
          // The policy applies per receiver: a fixed CQI, or the receiver's
          // own report above the bound.
          const int cqi = cfg.cqi_policy.mode == CqiMode::fixed
                              ? cfg.cqi_policy.cqi
                              : std::max(ucast_cqi[sources[r].row], cfg.cqi_policy.cqi);
          deliveries.push_back({s.user_id, rcv.id, rcv.serving_cell, s.origin_tti(),
                                s.copies[r].residual_bits, cqi});
          owner.emplace_back(k, r);
        }
      }
      const auto sched =
          scheduler::schedule_unicast_cam_baseline(deliveries, mbsfn, n_rb, n_re, tti, table);
      for (const auto& a : sched.allocations) {
        const auto& d = deliveries[a.delivery];
        const auto [k, r] = owner[a.delivery];
        const double eff_db = link::effective_sinr_db(
            range(ucast_sinr[sources[r].row], a.rb_start, a.rb_count),
            table.entry(d.cqi).modulation_bits);
        auto& copy = sources[k].copies[r];
        copy = traffic::consume(copy, a.bits, decode(tti, k, r, eff_db, d.cqi));
        mark_if_complete(k, r);
        ev.cam_rbs += a.rb_count;
        cell_rbs[static_cast<std::size_t>(a.cell)] += a.rb_count;
      }
      ev.withheld_rbs = ev.cam_rbs;
      free_rbs = sched.leftover;
    }

    // Ordinary users share what is left, round robin.
    if (!free_rbs.empty() && !ordinary.empty()) {
      std::vector<scheduler::OrdinaryUser> users;
      users.reserve(ordinary.size());
      for (const auto& o : ordinary) {
        users.push_back({o.user_id, o.cell, ucast_cqi[o.row]});
      }
      const auto alloc = scheduler::schedule_unicast_ordinary(users, free_rbs, n_re, tti, table);
      for (const auto& a : alloc) {
        if (a.rb_count <= 0) {
          continue;
        }
        auto& o = ordinary[ordinary_index[static_cast<std::size_t>(a.user_id)]];
        cell_rbs[static_cast<std::size_t>(a.cell)] += a.rb_count;
        double bits = static_cast<double>(a.bits);
        if (!cfg.ideal_decoding) {
          const double eff_db = link::effective_sinr_db(
              range(ucast_sinr[o.row], a.rb_start, a.rb_count), table.entry(a.cqi).modulation_bits);
          bits *= 1.0 - link::block_error_rate(eff_db, table.threshold_db(a.cqi), bler);
        }
        o.bits += bits;
      }
    }
    ev.max_cell_rbs = std::max(ev.max_cell_rbs,
                               *std::max_element(cell_rbs.begin(), cell_rbs.end()));

    // A packet is delivered once every receiver in the area holds it or a
    // newer CAM; the newest one must also have been on air completely.
    for (std::size_t k = 0; k < n_sources; ++k) {
      auto& s = sources[k];
      while (!s.open.empty()) {
        const auto& head = s.open.front();
        bool done = s.open.size() > 1 || !multicast || !s.buffer.pending();
        for (std::size_t r = 0; r < n_sources && done; ++r) {
          done = head.done[r] || !in_area[r];
        }
        if (!done) {
          break;
        }
        const auto& p = head.packet;
        if (static_cast<std::size_t>(p.sequence) < n_recorded) {
          rec.latency.set(k, static_cast<std::size_t>(p.sequence),
                          metrics::close_packet(s.user_id, p.sequence, p.generation_tti, tti + 1,
                                                s.open.back().packet.sequence - p.sequence));
        }
        s.open.pop_front();
      }
      if (s.open.empty()) {
        continue;
      }
      if (multicast) {
        ev.backlog_bits += s.buffer.residual_bits;
      } else {
        for (std::size_t r = 0; r < n_sources; ++r) {
          if (receiver_pending(k, r)) {
            ev.backlog_bits += s.copies[r].residual_bits;
          }
        }
      }
    }

    withheld_total += ev.withheld_rbs;
    rec.events.push_back(ev);
  }

  // Packets still in flight are right-censored at the end of the run.
  for (std::size_t k = 0; k < n_sources; ++k) {
    const auto& s = sources[k];
    for (const auto& o : s.open) {
      const auto& p = o.packet;
      if (static_cast<std::size_t>(p.sequence) < n_recorded) {
        rec.latency.set(k, static_cast<std::size_t>(p.sequence),
                        {cfg.n_tti - p.generation_tti,
                         s.open.back().packet.sequence - p.sequence, true});
      }
    }
  }
  if (!rec.latency.rectangular() ||
      (n_sources > 0 && rec.latency.packets() != n_recorded)) {
    throw InternalError("latency matrix is incomplete");
  }

  const double seconds = cfg.n_tti * 1e-3;
  for (const auto& o : ordinary) {
    rec.throughput.push_back({o.user_id, o.cell, seconds > 0.0 ? o.bits / seconds / 1e6 : 0.0});
  }
  const double area_rbs = static_cast<double>(cfg.n_tti) * n_rb * n_area_cells;
  rec.utilization.measured_pct = area_rbs > 0.0 ? 100.0 * withheld_total / area_rbs : 0.0;

  auto& row = rec.summary;
  row.mode = to_string(cfg.mode);
  row.bandwidth_mhz = cfg.bandwidth_mhz;
  row.cqi_policy = cfg.cqi_policy.label();
  const auto flat = rec.latency.flatten();
  row.mean_latency_tti = flat.empty() ? std::nan("")
                                      : std::accumulate(flat.begin(), flat.end(), 0.0) /
                                            static_cast<double>(flat.size());
  double tp = 0.0;
  for (const auto& t : rec.throughput) {
    tp += t.mbps;
  }
  row.mean_throughput_mbps =
      rec.throughput.empty() ? std::nan("") : tp / static_cast<double>(rec.throughput.size());
  row.utilization_pct = rec.utilization.measured_pct;
  row.analytic_utilization_pct = rec.utilization.analytic_pct;
  row.censored_entries = rec.latency.censored_count();
  row.congested = rec.reservation_infeasible || rec.overruns > 0;
  return rec;
}

std::uint64_t replicate_seed(std::uint64_t master, int k) {
  return k == 0 ? master : stream_seed(master, {0x7265706cULL, static_cast<std::uint64_t>(k)});
}

int default_workers() {
  if (const char* env = std::getenv("V2XCAST_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

Spread spread_of(const std::vector<double>& v) {
  Spread s;
  if (v.empty()) {
    return s;
  }
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) {
    ss += (x - s.mean) * (x - s.mean);
  }
  s.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

}  // namespace

ReplicateResult replicate(const ScenarioConfig& cfg, int n_seeds, int workers) {
  if (n_seeds < 1) {
    throw ConfigError("at least one replicate is required");
  }
  validate(cfg);
  if (workers <= 0) {
    workers = default_workers();
  }
  ReplicateResult out;
  out.runs.resize(static_cast<std::size_t>(n_seeds));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int k = next++; k < n_seeds; k = next++) {
      try {
        ScenarioConfig c = cfg;
        c.seed = replicate_seed(cfg.seed, k);
        out.runs[static_cast<std::size_t>(k)] = run(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };
  const int n_threads = std::min(workers, n_seeds);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  std::vector<double> lat;
  std::vector<double> tp;
  std::vector<double> util;
  for (const auto& r : out.runs) {
    out.latency.append_columns(r.latency);
    out.throughput.insert(out.throughput.end(), r.throughput.begin(), r.throughput.end());
    lat.push_back(r.summary.mean_latency_tti);
    tp.push_back(r.summary.mean_throughput_mbps);
    util.push_back(r.summary.utilization_pct);
  }
  out.mean_latency_tti = spread_of(lat);
  out.mean_throughput_mbps = spread_of(tp);
  out.utilization_pct = spread_of(util);

  out.summary = out.runs.front().summary;
  out.summary.mean_latency_tti = out.mean_latency_tti.mean;
  out.summary.mean_throughput_mbps = out.mean_throughput_mbps.mean;
  out.summary.utilization_pct = out.utilization_pct.mean;
  out.summary.congested = false;
  out.summary.censored_entries = 0;
  for (const auto& r : out.runs) {
    out.summary.congested = out.summary.congested || r.summary.congested;
    out.summary.censored_entries += r.summary.censored_entries;
  }
  return out;
}

}  // namespace v2xcast::engine
