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

#include "v2xcast/scenario.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "v2xcast/errors.hpp"

namespace v2xcast::scenario {

namespace {

using engine::ScenarioConfig;

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                         const std::string& what) const {
    std::ostringstream os;
    os << origin_;
    if (node.IsDefined() && node.Mark().line >= 0) {
      os << ":" << node.Mark().line + 1;
    }
    os << ": " << field << ": " << what;
    throw ConfigError(os.str());
  }

  template <typename T>
  void read(const YAML::Node& node, const std::string& field, T& out) const {
    if (!node.IsScalar()) {
      fail(node, field, "expected a scalar");
    }
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "cannot read '" + node.Scalar() + "'");
    }
  }

  /// Walks a mapping section, dispatching known keys and rejecting the rest.
  void section(const YAML::Node& root, const std::string& name,
               const std::map<std::string, std::function<void(const YAML::Node&,
                                                               const std::string&)>>& fields) const {
    const YAML::Node node = root[name];
    if (!node) {
      return;
    }
    if (!node.IsMap()) {
      fail(node, name, "expected a mapping");
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      const auto it = fields.find(key);
      if (it == fields.end()) {
        fail(kv.first, name + "." + key, "unknown key");
      }
      it->second(kv.second, name + "." + key);
    }
  }

  template <typename T>
  auto into(T& out) const {
    return [this, &out](const YAML::Node& n, const std::string& f) { read(n, f, out); };
  }

 private:
  std::string origin_;
};

std::string number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) {
    s += ".0";
  }
  return s;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  const Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ScenarioConfig cfg;
  if (!root || root.IsNull()) {
    engine::validate(cfg);
    return cfg;
  }
  if (!root.IsMap()) {
    rd.fail(root, "<root>", "expected a mapping");
  }
  static const std::set<std::string> kSections{"layout", "users",      "radio",     "link",
                                               "traffic", "scheduling", "simulation"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kSections.contains(key)) {
      rd.fail(kv.first, key, "unknown section");
    }
  }

  rd.section(root, "layout",
             {{"mbsfn_rings", rd.into(cfg.mbsfn_rings)},
              {"interference_rings", rd.into(cfg.interference_rings)},
              {"inter_site_distance_m", rd.into(cfg.inter_site_distance_m)}});
  rd.section(root, "users",
             {{"per_cell", rd.into(cfg.users_per_cell)},
              {"cars_per_cell", rd.into(cfg.cars_per_cell)},
              {"car_speed_kmh", rd.into(cfg.car_speed_kmh)}});
  rd.section(root, "radio",
             {{"bandwidth_mhz", rd.into(cfg.bandwidth_mhz)},
              {"carrier_ghz", rd.into(cfg.carrier_ghz)},
              {"n_re_per_rb", rd.into(cfg.n_re_per_rb)},
              {"tap_profile", rd.into(cfg.tap_profile)},
              {"shadowing_sigma_db", rd.into(cfg.shadowing_sigma_db)},
              {"pathloss_intercept_db", rd.into(cfg.pathloss_intercept_db)},
              {"pathloss_slope_db", rd.into(cfg.pathloss_slope_db)},
              {"min_distance_m", rd.into(cfg.min_distance_m)},
              {"noise_density_dbm_hz", rd.into(cfg.noise_density_dbm_hz)},
              {"noise_figure_db", rd.into(cfg.noise_figure_db)},
              {"tx_power_per_rb_dbm", rd.into(cfg.tx_power_per_rb_dbm)}});
  rd.section(
      root, "link",
      {{"bler_slope_db", rd.into(cfg.bler_slope_db)},
       {"feedback_delay_tti", rd.into(cfg.feedback_delay_tti)},
       {"ideal_decoding", rd.into(cfg.ideal_decoding)},
       {"cqi_table", [&](const YAML::Node& n, const std::string& f) {
          if (!n.IsSequence()) {
            rd.fail(n, f, "expected a list of entries");
          }
          std::vector<link::CqiEntry> entries;
          for (std::size_t i = 0; i < n.size(); ++i) {
            const auto item = n[i];
            const auto at = f + "[" + std::to_string(i) + "]";
            if (!item.IsMap()) {
              rd.fail(item, at, "expected a mapping");
            }
            link::CqiEntry e;
            const std::map<std::string, std::function<void(const YAML::Node&, const std::string&)>>
                keys{{"index", rd.into(e.index)},
                     {"modulation_bits", rd.into(e.modulation_bits)},
                     {"efficiency", rd.into(e.efficiency)},
                     {"threshold_db", rd.into(e.threshold_db)}};
            for (const auto& kv : item) {
              const auto key = kv.first.as<std::string>();
              const auto it = keys.find(key);
              if (it == keys.end()) {
                rd.fail(kv.first, at + "." + key, "unknown key");
              }
              it->second(kv.second, at + "." + key);
            }
            entries.push_back(e);
          }
          try {
            cfg.cqi_table = link::CqiTable(std::move(entries));
          } catch (const ConfigError& e) {
            rd.fail(n, f, e.what());
          }
        }}});
  rd.section(root, "traffic",
             {{"packet_bytes", rd.into(cfg.packet_bytes)},
              {"period_tti", rd.into(cfg.period_tti)}});
  rd.section(root, "scheduling",
             {{"mode",
               [&](const YAML::Node& n, const std::string& f) {
                 std::string s;
                 rd.read(n, f, s);
                 try {
                   cfg.mode = engine::parse_mode(s);
                 } catch (const ConfigError& e) {
                   rd.fail(n, f, e.what());
                 }
               }},
              {"cqi_policy",
               [&](const YAML::Node& n, const std::string& f) {
                 std::string s;
                 rd.read(n, f, s);
                 try {
                   cfg.cqi_policy = scheduler::CqiPolicy::parse(s);
                 } catch (const ConfigError& e) {
                   rd.fail(n, f, e.what());
                 }
               }},
              {"reservation_cqi", rd.into(cfg.reservation_cqi)},
              {"reassign_unused_subframes", rd.into(cfg.reassign_unused_subframes)}});
  rd.section(root, "simulation",
             {{"n_tti", rd.into(cfg.n_tti)},
              {"seed", rd.into(cfg.seed)},
              {"replications", rd.into(cfg.replications)}});

  try {
    engine::validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream os;
  const auto flag = [](bool b) { return b ? "true" : "false"; };
  os << "layout:\n"
     << "  mbsfn_rings: " << cfg.mbsfn_rings << "\n"
     << "  interference_rings: " << cfg.interference_rings << "\n"
     << "  inter_site_distance_m: " << number(cfg.inter_site_distance_m) << "\n"
     << "users:\n"
     << "  per_cell: " << cfg.users_per_cell << "\n"
     << "  cars_per_cell: " << cfg.cars_per_cell << "\n"
     << "  car_speed_kmh: " << number(cfg.car_speed_kmh) << "\n"
     << "radio:\n"
     << "  bandwidth_mhz: " << cfg.bandwidth_mhz << "\n"
     << "  carrier_ghz: " << number(cfg.carrier_ghz) << "\n"
     << "  n_re_per_rb: " << cfg.n_re_per_rb << "\n"
     << "  tap_profile: " << cfg.tap_profile << "\n"
     << "  shadowing_sigma_db: " << number(cfg.shadowing_sigma_db) << "\n"
     << "  pathloss_intercept_db: " << number(cfg.pathloss_intercept_db) << "\n"
     << "  pathloss_slope_db: " << number(cfg.pathloss_slope_db) << "\n"
     << "  min_distance_m: " << number(cfg.min_distance_m) << "\n"
     << "  noise_density_dbm_hz: " << number(cfg.noise_density_dbm_hz) << "\n"
     << "  noise_figure_db: " << number(cfg.noise_figure_db) << "\n"
     << "  tx_power_per_rb_dbm: " << number(cfg.tx_power_per_rb_dbm) << "\n"
     << "link:\n"
     << "  bler_slope_db: " << number(cfg.bler_slope_db) << "\n"
     << "  feedback_delay_tti: " << cfg.feedback_delay_tti << "\n"
     << "  ideal_decoding: " << flag(cfg.ideal_decoding) << "\n";
  if (cfg.cqi_table) {
    os << "  cqi_table:\n";
    for (const auto& e : cfg.cqi_table->entries()) {
      os << "    - {index: " << e.index << ", modulation_bits: " << e.modulation_bits
         << ", efficiency: " << number(e.efficiency)
         << ", threshold_db: " << number(e.threshold_db) << "}\n";
    }
  }
  os << "traffic:\n"
     << "  packet_bytes: " << cfg.packet_bytes << "\n"
     << "  period_tti: " << cfg.period_tti << "\n"
     << "scheduling:\n"
     << "  mode: " << engine::to_string(cfg.mode) << "\n"
     << "  cqi_policy: " << cfg.cqi_policy.label() << "\n"
     << "  reservation_cqi: " << cfg.reservation_cqi << "\n"
     << "  reassign_unused_subframes: " << flag(cfg.reassign_unused_subframes) << "\n"
     << "simulation:\n"
     << "  n_tti: " << cfg.n_tti << "\n"
     << "  seed: " << cfg.seed << "\n"
     << "  replications: " << cfg.replications << "\n";
  return os.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string body = serialize_scenario(cfg);
  const std::string blob = "blob " + std::to_string(body.size()) + std::string(1, '\0') + body;
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md.data(), &len, EVP_sha1(), nullptr) != 1) {
    throw InternalError("SHA-1 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

}  // namespace v2xcast::scenario
