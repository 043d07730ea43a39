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

#include <cmath>
#include <limits>
#include <span>

#include "volpool/capacity.hpp"
#include "volpool/error.hpp"
#include "volpool/units.hpp"

namespace volpool::detail {

inline void check_rate_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 0.0 && std::isfinite(grid[i]), "data rate grid must be non-negative");
    if (i > 0) require(grid[i] >= grid[i - 1], "data rate grid must be ascending");
  }
}

inline double host_utilization(const HostRecord& h, const CapacityFactors& f) {
  return h.cpu_efficiency * h.on_fraction * h.active_fraction * h.resource_share / f.redundancy;
}

/// Critical rate with zero-speed hosts treated as never network-saturated.
inline double critical_or_inf(const HostRecord& h) {
  return whole_host_flops(h) > 0.0 ? critical_data_rate(h) : std::numeric_limits<double>::infinity();
}

inline double network_bytes_per_s(const HostRecord& h, const CapacityFactors& f) {
  return units::kbps_to_bytes_per_second(h.throughput_down_kbps) * f.connected_fraction * f.on_fraction;
}

inline void check_access_source(const AccessSource& s) {
  require(s.network || (s.disk_rate_mb_s >= 0.0 && std::isfinite(s.disk_rate_mb_s)),
          "access rate: per-host disk rate must be >= 0");
}

}  // namespace volpool::detail
