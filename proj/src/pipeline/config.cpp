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

#include "plrs/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace plrs {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw InputError("config: invalid value '" + value + "' for " + key);
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "knot_method", "criterion",     "min_obs_per_state_model", "min_obs_per_state_test",
      "alpha",       "fdr_threshold", "mc_draws",                "seed",
      "threads",     "grid_size"};
  return keys;
}

void set_option(Config& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "knot_method") {
    c.knot_method = parse_number<int>(key, value);
    if (c.knot_method != 1 && c.knot_method != 2)
      throw InputError("config: knot_method must be 1 or 2");
  } else if (key == "criterion") {
    const auto crit = parse_criterion(value);
    if (!crit) throw InputError("config: criterion must be osaic, aic or bic");
    c.criterion = *crit;
  } else if (key == "min_obs_per_state_model") {
    c.min_obs_per_state_model = parse_number<int>(key, value);
    if (c.min_obs_per_state_model < 1) throw InputError("config: " + key + " must be >= 1");
  } else if (key == "min_obs_per_state_test") {
    c.min_obs_per_state_test = parse_number<int>(key, value);
    if (c.min_obs_per_state_test < 1) throw InputError("config: " + key + " must be >= 1");
  } else if (key == "alpha") {
    c.alpha = parse_number<double>(key, value);
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InputError("config: alpha must lie in (0, 1)");
  } else if (key == "fdr_threshold") {
    c.fdr_threshold = parse_number<double>(key, value);
    if (!(c.fdr_threshold > 0.0 && c.fdr_threshold <= 1.0))
      throw InputError("config: fdr_threshold must lie in (0, 1]");
  } else if (key == "mc_draws") {
    c.mc_draws = parse_number<long>(key, value);
    if (c.mc_draws < 100) throw InputError("config: mc_draws must be >= 100");
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    c.threads = parse_number<int>(key, value);
    if (c.threads < 1) throw InputError("config: threads must be >= 1");
  } else if (key == "grid_size") {
    c.grid_size = parse_number<int>(key, value);
    if (c.grid_size < 2) throw InputError("config: grid_size must be >= 2");
  } else {
    throw InputError("config: unknown key '" + key + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(path + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_environment(Config& config) {
  for (const auto& key : config_keys()) {
    std::string name = kEnvPrefix + key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    if (const char* v = std::getenv(name.c_str())) set_option(config, key, v);
  }
}

Config load_config(const std::string& file, const std::map<std::string, std::string>& overrides) {
  Config c;
  if (!file.empty())
    for (const auto& [k, v] : read_config_file(file)) set_option(c, k, v);
  apply_environment(c);
  for (const auto& [k, v] : overrides) set_option(c, k, v);
  return c;
}

std::string to_string(const Config& c) {
  std::ostringstream os;
  os << "knot_method=" << c.knot_method << '\n'
     << "criterion=" << to_string(c.criterion) << '\n'
     << "min_obs_per_state_model=" << c.min_obs_per_state_model << '\n'
     << "min_obs_per_state_test=" << c.min_obs_per_state_test << '\n'
     << "alpha=" << c.alpha << '\n'
     << "fdr_threshold=" << c.fdr_threshold << '\n'
     << "mc_draws=" << c.mc_draws << '\n'
     << "seed=" << c.seed << '\n'
     << "threads=" << c.threads << '\n'
     << "grid_size=" << c.grid_size << '\n';
  return os.str();
}

}  // namespace plrs
