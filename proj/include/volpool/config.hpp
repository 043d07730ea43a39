// Copyright 2026 The volpool Authors
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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "volpool/capacity.hpp"
#include "volpool/ingest.hpp"
#include "volpool/population.hpp"
#include "volpool/sim.hpp"

namespace volpool {

using Json = nlohmann::ordered_json;

enum class OutputFormat { Csv, Json };

struct RunConfig {
  Json doc = Json::object();  // effective document after flag overrides
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::string> input;

  /// FNV-1a of the effective document without "out", as 16 hex digits.
  std::string config_hash() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::string> input;
};

RunConfig make_run_config(Json doc, const Overrides& overrides = {});
RunConfig load_run_config(const std::string& path, const Overrides& overrides = {});

Json to_json(const FieldGenerator& g);
FieldGenerator field_generator_from_json(const Json& j);

/// Starts from the measured-average preset unless "preset" is "empty".
PoolSpec pool_spec_from_json(const Json& j, std::uint64_t default_seed, std::size_t default_hosts);
ChurnModel churn_from_json(const Json& j);
/// Starts from the published factors; any listed key overrides.
CapacityFactors factors_from_json(const Json& j);
Json to_json(const CapacityFactors& f);
SimConfig sim_config_from_json(const Json& j, std::uint64_t seed);

Json to_json(const SimReport& r);
Json to_json(const AnalyticComparison& c);

}  // namespace volpool
