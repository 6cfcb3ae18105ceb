// Copyright 2026 The plrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration. Sources are layered: defaults, then a key=value file,
// then PLRS_<KEY> environment variables, then command-line overrides.

#pragma once

#include "plrs/selection.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace plrs {

struct Config {
  int knot_method = 1;  // 1: midpoints of hard calls, 2: call probabilities
  Criterion criterion = Criterion::OSAIC;
  int min_obs_per_state_model = 3;
  int min_obs_per_state_test = 5;
  double alpha = 0.05;
  double fdr_threshold = 0.1;
  long mc_draws = kScreenDraws;
  std::uint64_t seed = 1;
  int threads = 1;
  int grid_size = 100;
};

inline constexpr const char* kEnvPrefix = "PLRS_";

/// Keys accepted by set_option, in documentation order.
const std::vector<std::string>& config_keys();

/// Throws InputError for an unknown key or an invalid value.
void set_option(Config& config, const std::string& key, const std::string& value);

/// key=value lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies every PLRS_<KEY> variable found in the environment.
void apply_environment(Config& config);

/// Layered configuration; `overrides` are applied last.
Config load_config(const std::string& file, const std::map<std::string, std::string>& overrides);

/// One key=value line per option, in config_keys order.
std::string to_string(const Config& config);

}  // namespace plrs
