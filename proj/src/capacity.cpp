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

#include "volpool/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "capacity_detail.hpp"
#include "volpool/error.hpp"
#include "volpool/parallel.hpp"
#include "volpool/units.hpp"

namespace volpool {

void CapacityFactors::validate() const {
  const std::pair<double, const char*> nonneg[] = {{arrival_rate, "arrival_rate"},
                                                   {mean_lifetime, "mean_lifetime"},
                                                   {mean_ncpus, "mean_ncpus"},
                                                   {mean_flops_per_cpu, "mean_flops_per_cpu"}};
  for (const auto& [v, name] : nonneg)
    require(v >= 0.0 && std::isfinite(v), std::string(name) + " must be a finite value >= 0");
  const std::pair<double, const char*> fractions[] = {{cpu_efficiency, "cpu_efficiency"},
                                                      {on_fraction, "on_fraction"},
                                                      {active_fraction, "active_fraction"},
                                                      {resource_share, "resource_share"},
                                                      {connected_fraction, "connected_fraction"}};
  for (const auto& [v, name] : fractions) require(v >= 0.0 && v <= 1.0, std::string(name) + " out of [0,1]");
  require(redundancy >= 1.0 && std::isfinite(redundancy), "redundancy must be >= 1");
}

double CapacityFactors::hardware_product() const {
  return arrival_rate * mean_lifetime * mean_ncpus * mean_flops_per_cpu;
}

CapacityFactors CapacityFactors::measured_defaults() {
  CapacityFactors f;
  f.mean_lifetime = 91.0;
  f.arrival_rate = 331785.0 / f.mean_lifetime;
  f.mean_ncpus = 1.0;
  f.mean_flops_per_cpu = 535169.0 / 331785.0;
  f.cpu_efficiency = 0.899;
  f.on_fraction = 0.81;
  f.active_fraction = 0.84;
  f.redundancy = 2.0;
  f.resource_share = 0.917;
  f.connected_fraction = 0.83;
  return f;
}

double utilization_product(const CapacityFactors& f) {
  f.validate();
  return f.cpu_efficiency * f.on_fraction * f.active_fraction * (1.0 / f.redundancy) * f.resource_share;
}

double potential_flops(const CapacityFactors& f) { return f.hardware_product() * utilization_product(f); }

double hardware_flops(std::span<const HostRecord> pool) {
  return parallel::sum(pool.size(), [&](std::size_t i) { return whole_host_flops(pool[i]); });
}

double critical_data_rate(const HostRecord& host) {
  const double speed = whole_host_flops(host);
  if (!(speed > 0.0)) throw Error("undefined critical rate: host " + host.host_id + " has zero speed");
  return units::megabytes_per_hour_per_mbps() * units::kbps_to_mbps(host.throughput_down_kbps) / speed;
}

double available_flops_at_rate(const HostRecord& host, double data_rate) {
  require(data_rate >= 0.0, "data rate must be >= 0");
  const double speed = whole_host_flops(host);
  if (data_rate == 0.0) return speed;
  const double network_limited =
      units::megabytes_per_hour_per_mbps() * units::kbps_to_mbps(host.throughput_down_kbps) / data_rate;
  return std::min(speed, network_limited);
}

std::vector<RateCurvePoint> compute_vs_rate_curve(std::span<const HostRecord> pool, std::span<const double> grid,
                                                  const CapacityFactors& f, CurveMode mode) {
  detail::check_rate_grid(grid);
  const double pool_util = utilization_product(f);
  const std::size_t g = grid.size();

  // Per chunk: g flops partials followed by g unsaturated counts.
  auto partials = parallel::map_chunks<std::vector<double>>(pool.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> local(2 * g, 0.0);
    for (std::size_t i = b; i < e; ++i) {
      const HostRecord& h = pool[i];
      const double util = mode == CurveMode::PerHost ? detail::host_utilization(h, f) : 1.0;
      const double critical = detail::critical_or_inf(h);
      for (std::size_t k = 0; k < g; ++k) {
        local[k] += util * available_flops_at_rate(h, grid[k]);
        if (critical >= grid[k]) local[g + k] += 1.0;
      }
    }
    return local;
  });

  std::vector<double> totals(2 * g, 0.0);
  for (const auto& p : partials)
    for (std::size_t k = 0; k < 2 * g; ++k) totals[k] += p[k];

  std::vector<RateCurvePoint> curve(g);
  for (std::size_t k = 0; k < g; ++k) {
    curve[k].data_rate = grid[k];
    curve[k].total_flops = mode == CurveMode::PoolAverage ? pool_util * totals[k] : totals[k];
    curve[k].unsaturated_fraction = pool.empty() ? 1.0 : totals[g + k] / static_cast<double>(pool.size());
  }
  return curve;
}

std::vector<AggregatePoint> conditional_aggregate(std::span<const HostRecord> pool, HostField resource,
                                                  HostField condition, std::span<const double> thresholds) {
  const std::size_t t = thresholds.size();
  auto partials = parallel::map_chunks<std::vector<double>>(pool.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> local(t, 0.0);
    for (std::size_t i = b; i < e; ++i) {
      const double cond = field_value(pool[i], condition);
      const double amount = field_value(pool[i], resource);
      for (std::size_t k = 0; k < t; ++k)
        if (cond >= thresholds[k]) local[k] += amount;
    }
    return local;
  });
  std::vector<AggregatePoint> out(t);
  for (std::size_t k = 0; k < t; ++k) out[k].threshold = thresholds[k];
  for (const auto& p : partials)
    for (std::size_t k = 0; k < t; ++k) out[k].total += p[k];
  return out;
}

std::string_view to_string(ScalingFactor f) {
  switch (f) {
    case ScalingFactor::OnFraction: return "on_fraction";
    case ScalingFactor::ConnectedFraction: return "connected_fraction";
    case ScalingFactor::ActiveFraction: return "active_fraction";
    case ScalingFactor::ResourceShare: return "resource_share";
    case ScalingFactor::InverseRedundancy: return "1/redundancy";
  }
  return "?";
}

FactorSelection parse_factor_selection(std::span<const std::string> names) {
  static constexpr ScalingFactor kAll[] = {ScalingFactor::OnFraction, ScalingFactor::ConnectedFraction,
                                           ScalingFactor::ActiveFraction, ScalingFactor::ResourceShare,
                                           ScalingFactor::InverseRedundancy};
  FactorSelection out;
  for (const auto& name : names) {
    auto it = std::find_if(std::begin(kAll), std::end(kAll), [&](ScalingFactor f) { return to_string(f) == name; });
    if (it == std::end(kAll)) throw Error("unknown factor name: " + name);
    out.insert(*it);
  }
  return out;
}

double selection_product(const CapacityFactors& f, const FactorSelection& selection) {
  f.validate();
  double p = 1.0;
  for (auto s : selection) {
    switch (s) {
      case ScalingFactor::OnFraction: p *= f.on_fraction; break;
      case ScalingFactor::ConnectedFraction: p *= f.connected_fraction; break;
      case ScalingFactor::ActiveFraction: p *= f.active_fraction; break;
      case ScalingFactor::ResourceShare: p *= f.resource_share; break;
      case ScalingFactor::InverseRedundancy: p /= f.redundancy; break;
    }
  }
  return p;
}

double storage_potential(std::span<const HostRecord> pool, const CapacityFactors& f, const FactorSelection& selection) {
  const double scale = selection_product(f, selection);
  return scale * parallel::sum(pool.size(), [&](std::size_t i) { return pool[i].disk_free_gb; });
}

double access_rate(std::span<const HostRecord> pool, const CapacityFactors& f, const AccessSource& source) {
  detail::check_access_source(source);
  f.validate();
  if (source.network)
    return parallel::sum(pool.size(), [&](std::size_t i) { return detail::network_bytes_per_s(pool[i], f); });
  return static_cast<double>(pool.size()) * source.disk_rate_mb_s * units::kMega * f.on_fraction * f.active_fraction;
}

}  // namespace volpool
