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

#include "volpool/host_model.hpp"

namespace volpool::test {

inline HostRecord make_host(std::string id = "h0", std::string user = "u0") {
  HostRecord h;
  h.host_id = std::move(id);
  h.user_id = std::move(user);
  h.n_cpus = 1;
  h.flops_per_cpu = 1.0;
  h.iops_per_cpu = 2.0;
  h.ram_mb = 512;
  h.swap_gb = 1;
  h.disk_total_gb = 80;
  h.disk_free_gb = 40;
  h.throughput_down_kbps = 1000;
  h.on_fraction = 0.8;
  h.connected_fraction = 0.9;
  h.active_fraction = 0.85;
  h.cpu_efficiency = 0.9;
  h.cpu_vendor = CpuVendor::Intel;
  h.os = Os::WindowsXP;
  h.country = "USA";
  h.venue = Venue::Home;
  h.created_utc = 1100000000;
  h.last_contact_utc = 1130000000;
  return h;
}

inline std::string fixture(const std::string& name) { return std::string(VOLPOOL_FIXTURE_DIR) + "/" + name; }

}  // namespace volpool::test
