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

// Macroscopic pathloss/shadowing and time-varying multipath fading.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2xcast/topology.hpp"

namespace v2xcast::channel {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kResourceBlockBandwidthHz = 180e3;

struct PathlossModel {
  double intercept_db = 128.1;
  /// dB per decade of distance in km.
  double slope_db = 37.6;
  double min_distance_m = 35.0;
};

struct MacroscopicGain {
  double gain_db = 0.0;
  /// Linear amplitude gain, 10^(gain_db / 20).
  double gamma = 1.0;
};

/// Pathloss plus an additive shadowing offset. Distances below the model's
/// minimum are clamped; non-positive distances additionally log a warning.
MacroscopicGain macroscopic_gain(double distance_m, double shadowing_db,
                                 const PathlossModel& model = {});

struct TapProfile {
  std::string name;
  std::vector<double> delays_s;
  /// Linear tap powers, normalized to sum to one.
  std::vector<double> powers;
};

/// ITU Vehicular-A, six taps.
TapProfile veh_a_profile();
TapProfile single_tap_profile();
/// Looks up "VehA" or "flat"; throws ConfigError otherwise.
TapProfile tap_profile(std::string_view name);

double doppler_frequency(double speed_mps, double carrier_hz);

/// Tapped-delay-line Rayleigh fading. Each tap is a sum of complex
/// sinusoids with arrival angles evenly spread around the circle (random
/// rotation per tap), which yields a Jakes spectrum and a J0 autocorrelation.
class FadingProcess {
 public:
  static constexpr int kDefaultOscillators = 20;

  FadingProcess(const TapProfile& profile, double doppler_hz, std::uint64_t seed,
                int oscillators = kDefaultOscillators);

  std::size_t tap_count() const { return delays_.size(); }
  double doppler_hz() const { return doppler_hz_; }
  std::span<const double> tap_delays() const { return delays_; }
  std::span<const double> tap_powers() const { return powers_; }

  Complex tap_amplitude(std::size_t tap, double t) const;
  /// All tap amplitudes at time `t`; `out` must hold tap_count() values.
  void tap_amplitudes(double t, std::span<Complex> out) const;

 private:
  struct Oscillator {
    double angular_doppler;  // rad/s
    double phase;            // rad
  };

  double doppler_hz_;
  int oscillators_;
  std::vector<double> delays_;
  std::vector<double> powers_;
  std::vector<double> scale_;  // sqrt(power / oscillators)
  std::vector<Oscillator> osc_;  // tap-major
};

/// Frequency response of the process at time `t` and offset `freq_offset_hz`
/// from the carrier.
Complex fading_coefficient(const FadingProcess& proc, double t, double freq_offset_hz);

/// Centre frequency offsets of `n_rb` resource blocks around the carrier.
std::vector<double> resource_block_offsets(int n_rb);

struct ChannelConfig {
  double carrier_hz = 2.14e9;
  int n_rb = 25;
  std::string tap_profile = "VehA";
  double shadowing_sigma_db = 8.0;
  PathlossModel pathloss;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 9.0;
  double tx_power_per_rb_dbm = 26.0;
  double tti_s = 1e-3;
  int oscillators = FadingProcess::kDefaultOscillators;
};

/// Noise power per resource block relative to the per-RB transmit power.
double noise_variance(const ChannelConfig& cfg);

/// Channel coefficients of one TTI: h[row][cell][rb], one row per requested user.
class ChannelSnapshot {
 public:
  ChannelSnapshot(int tti, double noise_variance, std::vector<int> user_ids,
                  std::size_t n_cells, std::size_t n_rb);

  int tti() const { return tti_; }
  double noise_variance() const { return noise_variance_; }
  std::size_t rows() const { return user_ids_.size(); }
  std::size_t cells() const { return n_cells_; }
  std::size_t resource_blocks() const { return n_rb_; }
  const std::vector<int>& user_ids() const { return user_ids_; }
  /// Row of `user_id`, or -1 when the user was not evaluated.
  int row_of(int user_id) const;

  Complex at(std::size_t row, std::size_t cell, std::size_t rb) const {
    return h_[(row * n_cells_ + cell) * n_rb_ + rb];
  }
  std::span<const Complex> response(std::size_t row, std::size_t cell) const {
    return {h_.data() + (row * n_cells_ + cell) * n_rb_, n_rb_};
  }
  std::span<Complex> response(std::size_t row, std::size_t cell) {
    return {h_.data() + (row * n_cells_ + cell) * n_rb_, n_rb_};
  }

  friend bool operator==(const ChannelSnapshot&, const ChannelSnapshot&) = default;

 private:
  int tti_;
  double noise_variance_;
  std::vector<int> user_ids_;
  std::vector<int> row_index_;
  std::size_t n_cells_;
  std::size_t n_rb_;
  std::vector<Complex> h_;
};

/// Per-run channel state: frozen shadowing and one fading process per
/// (user, cell) pair. Immutable once built.
class ChannelState {
 public:
  ChannelState(const topology::CellLayout& layout, const topology::UserPopulation& pop,
               const ChannelConfig& cfg, std::uint64_t seed);

  const ChannelConfig& config() const { return cfg_; }
  std::size_t users() const { return n_users_; }
  std::size_t cells() const { return n_cells_; }
  double noise_variance() const { return noise_variance_; }

  bool has_process(int user_id, int cell_id) const;
  const FadingProcess& process(int user_id, int cell_id) const;
  double shadowing_db(int user_id, int cell_id) const;

  /// Macroscopic gain for a user at an arbitrary position.
  MacroscopicGain gain(const topology::CellLayout& layout, int user_id, int cell_id,
                       topology::Vec2 position) const;
  /// Cell with the largest macroscopic gain.
  int strongest_cell(const topology::CellLayout& layout, int user_id,
                     topology::Vec2 position) const;

  /// Fading frequency response of a pair at time `t` over the RB grid.
  void fading_response(int user_id, int cell_id, double t, std::span<Complex> out) const;

 private:
  std::size_t index(int user_id, int cell_id) const;

  ChannelConfig cfg_;
  std::size_t n_users_;
  std::size_t n_cells_;
  double noise_variance_;
  std::vector<double> rb_offsets_;
  std::vector<double> shadowing_db_;
  std::vector<FadingProcess> processes_;
  // exp(-i 2 pi f_rb tau_tap), tap-major.
  std::vector<Complex> tap_phase_;
  std::size_t n_taps_;
  // Frequency responses of zero-Doppler pairs, which never change.
  std::vector<std::vector<Complex>> static_response_;
};

/// h[i][j][rb] = gamma_ij * fading_ij(t_tti, rb) for the requested users
/// (all users when `user_ids` is empty).
ChannelSnapshot snapshot(const topology::CellLayout& layout,
                         const topology::UserPopulation& pop, const ChannelState& state,
                         int tti, std::span<const int> user_ids = {});

}  // namespace v2xcast::channel
