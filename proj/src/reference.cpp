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

#include "volpool/reference.hpp"

#include <algorithm>
#include <cmath>

#include "capacity_detail.hpp"
#include "volpool/error.hpp"
#include "volpool/units.hpp"

namespace volpool::reference {

double hardware_flops(std::span<const HostRecord> pool) {
  double total = 0.0;
  for (const auto& h : pool) total += whole_host_flops(h);
  return total;
}

std::vector<RateCurvePoint> compute_vs_rate_curve(std::span<const HostRecord> pool, std::span<const double> grid,
                                                  const CapacityFactors& f, CurveMode mode) {
  detail::check_rate_grid(grid);
  const double pool_util = utilization_product(f);
  std::vector<RateCurvePoint> curve;
  for (double r : grid) {
    double total = 0.0;
    std::size_t unsaturated = 0;
    for (const auto& h : pool) {
      const double util = mode == CurveMode::PerHost ? detail::host_utilization(h, f) : pool_util;
      total += util * available_flops_at_rate(h, r);
      if (detail::critical_or_inf(h) >= r) ++unsaturated;
    }
    const double frac = pool.empty() ? 1.0 : static_cast<double>(unsaturated) / static_cast<double>(pool.size());
    curve.push_back({r, total, frac});
  }
  return curve;
}

std::vector<AggregatePoint> conditional_aggregate(std::span<const HostRecord> pool, HostField resource,
                                                  HostField condition, std::span<const double> thresholds) {
  std::vector<AggregatePoint> out;
  for (double x : thresholds) {
    double total = 0.0;
    for (const auto& h : pool)
      if (field_value(h, condition) >= x) total += field_value(h, resource);
    out.push_back({x, total});
  }
  return out;
}

double storage_potential(std::span<const HostRecord> pool, const CapacityFactors& f, const FactorSelection& selection) {
  const double scale = selection_product(f, selection);
  double total = 0.0;
  for (const auto& h : pool) total += h.disk_free_gb * scale;
  return total;
}

double access_rate(std::span<const HostRecord> pool, const CapacityFactors& f, const AccessSource& source) {
  detail::check_access_source(source);
  f.validate();
  double total = 0.0;
  for (const auto& h : pool)
    total += source.network ? detail::network_bytes_per_s(h, f)
                            : source.disk_rate_mb_s * units::kMega * f.on_fraction * f.active_fraction;
  return total;
}

Histogram make_histogram(std::span<const double> values, std::span<const double> edges, std::string field_name) {
  check_bin_edges(edges);
  Histogram h;
  h.field_name = std::move(field_name);
  h.bin_edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++h.non_finite;
      continue;
    }
    bool placed = false;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      if (v >= edges[k] && v < edges[k + 1]) {
        ++h.counts[k];
        placed = true;
        break;
      }
    }
    if (!placed) ++h.overflow;
  }
  return h;
}

}  // namespace volpool::reference
