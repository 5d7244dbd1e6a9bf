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

#pragma once

#include <stdexcept>
#include <string>

namespace v2xcast {

/// Invalid scenario or operation parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke a documented precondition (e.g. CQI index out of range).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The simulator's own bookkeeping is inconsistent.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SchedulingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested MBSFN reservation exceeds what a radio frame can carry.
class CongestionInfeasible : public std::runtime_error {
 public:
  CongestionInfeasible(const std::string& what, int required)
      : std::runtime_error(what), required_subframes_(required) {}

  int required_subframes() const noexcept { return required_subframes_; }

 private:
  int required_subframes_;
};

}  // namespace v2xcast
