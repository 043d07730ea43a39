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

#include <string>
#include <vector>

#include "volpool/config.hpp"

namespace volpool {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitInputError = 2 };

/// Default data-rate grid for sweeps, MB per reference quantum.
std::vector<double> default_rate_grid();

int cmd_ingest(const RunConfig& rc);
int cmd_ingest(const std::string& input_path, const std::string& out_dir);
int cmd_stats(const RunConfig& rc);
int cmd_stats(const std::string& input_path, const std::string& out_dir);
int cmd_capacity(const RunConfig& rc, bool check = false);
int cmd_sweep(const RunConfig& rc, bool check = false);
int cmd_simulate(const RunConfig& rc, bool check = false);

/// Full command-line entry point; never returns anything but 0, 1 or 2.
int run_cli(int argc, const char* const* argv);

}  // namespace volpool
