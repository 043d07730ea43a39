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

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "volpool/host_model.hpp"

namespace volpool {

/// Pool-average factors of the total-capacity product. `redundancy` is the
/// mean number of replicas per task and enters as its reciprocal.
/// `connected_fraction` only feeds the storage and transfer analogues.
struct CapacityFactors {
  double arrival_rate = 0.0;   // hosts/day
  double mean_lifetime = 0.0;  // days
  double mean_ncpus = 1.0;
  double mean_flops_per_cpu = 0.0;  // GFLOPS
  double cpu_efficiency = 1.0;
  double on_fraction = 1.0;
  double active_fraction = 1.0;
  double redundancy = 1.0;
  double resource_share = 1.0;
  double connected_fraction = 1.0;

  void validate() const;
  /// arrival * lifetime * ncpus * flops: the steady-state hardware GFLOPS.
  double hardware_product() const;

  /// Measured pool averages (331,785 hosts, 91-day lifetime, two-fold redundancy).
  static CapacityFactors measured_defaults();
};

double utilization_product(const CapacityFactors& f);
double potential_flops(const CapacityFactors& f);

/// Sum of whole-host GFLOPS.
double hardware_flops(std::span<const HostRecord> pool);

/// Data rate (MB per reference quantum of FLOP) at which the host's network and
/// CPU saturate together. Throws for hosts with zero speed.
double critical_data_rate(const HostRecord& host);
/// min(host speed, network-limited speed) at data rate R.
double available_flops_at_rate(const HostRecord& host, double data_rate);

struct RateCurvePoint {
  double data_rate = 0.0;
  double total_flops = 0.0;  // GFLOPS
  double unsaturated_fraction = 0.0;
};

enum class CurveMode {
  PoolAverage,  // one utilization product for every host
  PerHost,      // each host's own efficiency/on/active/share, pool redundancy
};

/// Throws for a negative or unsorted grid.
std::vector<RateCurvePoint> compute_vs_rate_curve(std::span<const HostRecord> pool, std::span<const double> grid,
                                                  const CapacityFactors& f, CurveMode mode = CurveMode::PoolAverage);

struct AggregatePoint {
  double threshold = 0.0;
  double total = 0.0;
};

/// Total of `resource` over hosts whose `condition` field is >= each threshold.
std::vector<AggregatePoint> conditional_aggregate(std::span<const HostRecord> pool, HostField resource,
                                                  HostField condition, std::span<const double> thresholds);

enum class ScalingFactor { OnFraction, ConnectedFraction, ActiveFraction, ResourceShare, InverseRedundancy };
using FactorSelection = std::set<ScalingFactor>;

/// Names: on_fraction, connected_fraction, active_fraction, resource_share,
/// 1/redundancy. Throws on anything else.
FactorSelection parse_factor_selection(std::span<const std::string> names);
std::string_view to_string(ScalingFactor f);
double selection_product(const CapacityFactors& f, const FactorSelection& selection);

/// GB: total free disk scaled by the selected factors.
double storage_potential(std::span<const HostRecord> pool, const CapacityFactors& f, const FactorSelection& selection);

/// Per-host rate source for access_rate: the host's download link, or a fixed
/// disk rate in MB/s.
struct AccessSource {
  bool network = true;
  double disk_rate_mb_s = 0.0;

  static AccessSource from_network() { return {}; }
  static AccessSource from_disk_rate(double mb_s) { return {false, mb_s}; }
};

/// Aggregate bytes/s.
double access_rate(std::span<const HostRecord> pool, const CapacityFactors& f, const AccessSource& source);

}  // namespace volpool
