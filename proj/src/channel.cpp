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

#include "v2xcast/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>

#include "v2xcast/errors.hpp"
#include "v2xcast/random.hpp"

namespace v2xcast::channel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TapProfile normalized(TapProfile p) {
  const double total = std::accumulate(p.powers.begin(), p.powers.end(), 0.0);
  for (auto& w : p.powers) {
    w /= total;
  }
  return p;
}

}  // namespace

MacroscopicGain macroscopic_gain(double distance_m, double shadowing_db,
                                 const PathlossModel& model) {
  if (distance_m <= 0.0) {
    std::clog << "warning: non-positive distance " << distance_m << " m clamped to "
              << model.min_distance_m << " m\n";
  }
  const double d = std::max(distance_m, model.min_distance_m);
  const double pathloss_db = model.intercept_db + model.slope_db * std::log10(d / 1000.0);
  MacroscopicGain g;
  g.gain_db = -pathloss_db + shadowing_db;
  g.gamma = std::pow(10.0, g.gain_db / 20.0);
  return g;
}

TapProfile veh_a_profile() {
  TapProfile p;
  p.name = "VehA";
  p.delays_s = {0.0, 310e-9, 710e-9, 1090e-9, 1730e-9, 2510e-9};
  for (double db : {0.0, -1.0, -9.0, -10.0, -15.0, -20.0}) {
    p.powers.push_back(std::pow(10.0, db / 10.0));
  }
  return normalized(std::move(p));
}

TapProfile single_tap_profile() { return {"flat", {0.0}, {1.0}}; }

TapProfile tap_profile(std::string_view name) {
  if (name == "VehA") {
    return veh_a_profile();
  }
  if (name == "flat") {
    return single_tap_profile();
  }
  throw ConfigError("unknown tap profile '" + std::string(name) + "'");
}

double doppler_frequency(double speed_mps, double carrier_hz) {
  return speed_mps * carrier_hz / kSpeedOfLight;
}

FadingProcess::FadingProcess(const TapProfile& profile, double doppler_hz,
                             std::uint64_t seed, int oscillators)
    : doppler_hz_(doppler_hz),
      oscillators_(oscillators),
      delays_(profile.delays_s),
      powers_(profile.powers) {
  if (oscillators_ < 1) {
    throw ConfigError("fading needs at least one oscillator per tap");
  }
  if (delays_.size() != powers_.size() || delays_.empty()) {
    throw ConfigError("tap profile '" + profile.name + "' is malformed");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform_phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> rotation(-std::numbers::pi, std::numbers::pi);
  const double wd = kTwoPi * doppler_hz_;
  osc_.reserve(delays_.size() * static_cast<std::size_t>(oscillators_));
  for (double p : powers_) {
    scale_.push_back(std::sqrt(p / oscillators_));
    const double theta = rotation(rng);
    for (int n = 1; n <= oscillators_; ++n) {
      const double alpha = (kTwoPi * n - std::numbers::pi + theta) / oscillators_;
      osc_.push_back({wd * std::cos(alpha), uniform_phase(rng)});
    }
  }
}

Complex FadingProcess::tap_amplitude(std::size_t tap, double t) const {
  const auto* o = osc_.data() + tap * static_cast<std::size_t>(oscillators_);
  double re = 0.0;
  double im = 0.0;
  for (int n = 0; n < oscillators_; ++n) {
    const double arg = o[n].angular_doppler * t + o[n].phase;
    re += std::cos(arg);
    im += std::sin(arg);
  }
  return {scale_[tap] * re, scale_[tap] * im};
}

void FadingProcess::tap_amplitudes(double t, std::span<Complex> out) const {
  for (std::size_t k = 0; k < delays_.size(); ++k) {
    out[k] = tap_amplitude(k, t);
  }
}

Complex fading_coefficient(const FadingProcess& proc, double t, double freq_offset_hz) {
  Complex h{};
  const auto delays = proc.tap_delays();
  for (std::size_t k = 0; k < proc.tap_count(); ++k) {
    h += proc.tap_amplitude(k, t) * std::polar(1.0, -kTwoPi * freq_offset_hz * delays[k]);
  }
  return h;
}

std::vector<double> resource_block_offsets(int n_rb) {
  std::vector<double> f(static_cast<std::size_t>(n_rb));
  for (int rb = 0; rb < n_rb; ++rb) {
    f[static_cast<std::size_t>(rb)] = (rb - (n_rb - 1) / 2.0) * kResourceBlockBandwidthHz;
  }
  return f;
}

double noise_variance(const ChannelConfig& cfg) {
  const double noise_dbm = cfg.noise_density_dbm_hz +
                           10.0 * std::log10(kResourceBlockBandwidthHz) + cfg.noise_figure_db;
  return std::pow(10.0, (noise_dbm - cfg.tx_power_per_rb_dbm) / 10.0);
}

ChannelSnapshot::ChannelSnapshot(int tti, double noise_variance, std::vector<int> user_ids,
                                 std::size_t n_cells, std::size_t n_rb)
    : tti_(tti),
      noise_variance_(noise_variance),
      user_ids_(std::move(user_ids)),
      n_cells_(n_cells),
      n_rb_(n_rb),
      h_(user_ids_.size() * n_cells * n_rb) {
  int max_id = -1;
  for (int id : user_ids_) {
    max_id = std::max(max_id, id);
  }
  row_index_.assign(static_cast<std::size_t>(max_id + 1), -1);
  for (std::size_t row = 0; row < user_ids_.size(); ++row) {
    row_index_[static_cast<std::size_t>(user_ids_[row])] = static_cast<int>(row);
  }
}

int ChannelSnapshot::row_of(int user_id) const {
  if (user_id < 0 || static_cast<std::size_t>(user_id) >= row_index_.size()) {
    return -1;
  }
  return row_index_[static_cast<std::size_t>(user_id)];
}

ChannelState::ChannelState(const topology::CellLayout& layout,
                           const topology::UserPopulation& pop, const ChannelConfig& cfg,
                           std::uint64_t seed)
    : cfg_(cfg),
      n_users_(pop.size()),
      n_cells_(layout.size()),
      noise_variance_(channel::noise_variance(cfg)),
      rb_offsets_(resource_block_offsets(cfg.n_rb)) {
  if (cfg.n_rb < 1) {
    throw ConfigError("channel needs at least one resource block");
  }
  if (cfg.shadowing_sigma_db < 0.0) {
    throw ConfigError("shadowing standard deviation must be non-negative");
  }
  const TapProfile profile = tap_profile(cfg.tap_profile);
  n_taps_ = profile.delays_s.size();
  tap_phase_.resize(n_taps_ * rb_offsets_.size());
  for (std::size_t k = 0; k < n_taps_; ++k) {
    for (std::size_t rb = 0; rb < rb_offsets_.size(); ++rb) {
      tap_phase_[k * rb_offsets_.size() + rb] =
          std::polar(1.0, -kTwoPi * rb_offsets_[rb] * profile.delays_s[k]);
    }
  }

  shadowing_db_.resize(n_users_ * n_cells_);
  processes_.reserve(n_users_ * n_cells_);
  static_response_.resize(n_users_ * n_cells_);
  for (std::size_t i = 0; i < n_users_; ++i) {
    const auto& u = pop.users[i];
    if (u.id != static_cast<int>(i)) {
      throw InternalError("user ids must be dense and ordered");
    }
    Rng shadow_rng(stream_seed(seed, {stream::kShadowing, static_cast<std::uint64_t>(u.id)}));
    std::normal_distribution<double> shadow(0.0, cfg.shadowing_sigma_db);
    const double fd = doppler_frequency(u.velocity.norm(), cfg.carrier_hz);
    for (std::size_t j = 0; j < n_cells_; ++j) {
      shadowing_db_[i * n_cells_ + j] = cfg.shadowing_sigma_db > 0.0 ? shadow(shadow_rng) : 0.0;
      processes_.emplace_back(
          profile, fd,
          stream_seed(seed, {stream::kFading, static_cast<std::uint64_t>(u.id),
                             static_cast<std::uint64_t>(j)}),
          cfg.oscillators);
    }
  }
  for (std::size_t idx = 0; idx < processes_.size(); ++idx) {
    if (processes_[idx].doppler_hz() == 0.0) {
      std::vector<Complex> resp(rb_offsets_.size());
      fading_response(static_cast<int>(idx / n_cells_), static_cast<int>(idx % n_cells_), 0.0,
                       resp);
      static_response_[idx] = std::move(resp);
    }
  }
}

std::size_t ChannelState::index(int user_id, int cell_id) const {
  if (!has_process(user_id, cell_id)) {
    throw InternalError("no fading process for user " + std::to_string(user_id) + ", cell " +
                        std::to_string(cell_id));
  }
  return static_cast<std::size_t>(user_id) * n_cells_ + static_cast<std::size_t>(cell_id);
}

bool ChannelState::has_process(int user_id, int cell_id) const {
  return user_id >= 0 && cell_id >= 0 && static_cast<std::size_t>(user_id) < n_users_ &&
         static_cast<std::size_t>(cell_id) < n_cells_;
}

const FadingProcess& ChannelState::process(int user_id, int cell_id) const {
  return processes_[index(user_id, cell_id)];
}

double ChannelState::shadowing_db(int user_id, int cell_id) const {
  return shadowing_db_[index(user_id, cell_id)];
}

MacroscopicGain ChannelState::gain(const topology::CellLayout& layout, int user_id,
                                   int cell_id, topology::Vec2 position) const {
  const double d = (position - layout.cell(cell_id).position).norm();
  return macroscopic_gain(d, shadowing_db(user_id, cell_id), cfg_.pathloss);
}

int ChannelState::strongest_cell(const topology::CellLayout& layout, int user_id,
                                 topology::Vec2 position) const {
  int best = 0;
  double best_db = -1e300;
  for (const auto& c : layout.cells()) {
    const double g = gain(layout, user_id, c.id, position).gain_db;
    if (g > best_db) {
      best_db = g;
      best = c.id;
    }
  }
  return best;
}

void ChannelState::fading_response(int user_id, int cell_id, double t,
                                   std::span<Complex> out) const {
  const std::size_t idx = index(user_id, cell_id);
  if (!static_response_[idx].empty()) {
    std::copy(static_response_[idx].begin(), static_response_[idx].end(), out.begin());
    return;
  }
  const FadingProcess& proc = processes_[idx];
  Complex taps[16];
  std::vector<Complex> heap_taps;
  std::span<Complex> amps(taps, n_taps_);
  if (n_taps_ > 16) {
    heap_taps.resize(n_taps_);
    amps = heap_taps;
  }
  proc.tap_amplitudes(t, amps);
  const std::size_t n_rb = rb_offsets_.size();
  std::fill(out.begin(), out.end(), Complex{});
  for (std::size_t k = 0; k < n_taps_; ++k) {
    const Complex a = amps[k];
    const Complex* phase = tap_phase_.data() + k * n_rb;
    for (std::size_t rb = 0; rb < n_rb; ++rb) {
      out[rb] += a * phase[rb];
    }
  }
}

ChannelSnapshot snapshot(const topology::CellLayout& layout,
                         const topology::UserPopulation& pop, const ChannelState& state,
                         int tti, std::span<const int> user_ids) {
  if (pop.size() > state.users() || layout.size() != state.cells()) {
    throw InternalError("channel state does not cover the population");
  }
  std::vector<int> rows;
  if (user_ids.empty()) {
    rows.resize(pop.size());
    std::iota(rows.begin(), rows.end(), 0);
  } else {
    rows.assign(user_ids.begin(), user_ids.end());
    for (int id : rows) {
      if (id < 0 || static_cast<std::size_t>(id) >= pop.size()) {
        throw InternalError("snapshot requested for unknown user " + std::to_string(id));
      }
    }
  }
  const auto n_rb = static_cast<std::size_t>(state.config().n_rb);
  ChannelSnapshot snap(tti, state.noise_variance(), rows, layout.size(), n_rb);
  const double t = tti * state.config().tti_s;
  for (std::size_t row = 0; row < rows.size(); ++row) {
    const auto& u = pop.users.at(static_cast<std::size_t>(rows[row]));
    for (const auto& c : layout.cells()) {
      auto h = snap.response(row, static_cast<std::size_t>(c.id));
      state.fading_response(u.id, c.id, t, h);
      const double gamma = state.gain(layout, u.id, c.id, u.position).gamma;
      for (auto& v : h) {
        v *= gamma;
      }
    }
  }
  return snap;
}

}  // namespace v2xcast::channel
