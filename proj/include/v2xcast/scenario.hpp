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

// Scenario files: a small YAML document with one section per concern.

#pragma once

#include <filesystem>
#include <string>

#include "v2xcast/engine.hpp"

namespace v2xcast::scenario {

/// Parses a scenario document. Missing keys keep their defaults; unknown
/// keys and bad values throw ConfigError naming `origin`, line and field.
engine::ScenarioConfig parse_scenario(const std::string& text,
                                      const std::string& origin = "<scenario>");

engine::ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Canonical form: every field, fixed order, shortest round-trip numbers.
std::string serialize_scenario(const engine::ScenarioConfig& cfg);

/// Git blob hash (hex SHA-1) of the canonical form.
std::string config_hash(const engine::ScenarioConfig& cfg);

}  // namespace v2xcast::scenario
