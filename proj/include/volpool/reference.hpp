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

// Serial reference versions of the parallel kernels. Straight loops in input
// order; kept for cross-checking and benchmarking.

#include <span>
#include <vector>

#include "volpool/capacity.hpp"
#include "volpool/histogram.hpp"

namespace volpool::reference {

double hardware_flops(std::span<const HostRecord> pool);
std::vector<RateCurvePoint> compute_vs_rate_curve(std::span<const HostRecord> pool, std::span<const double> grid,
                                                  const CapacityFactors& f, CurveMode mode = CurveMode::PoolAverage);
std::vector<AggregatePoint> conditional_aggregate(std::span<const HostRecord> pool, HostField resource,
                                                  HostField condition, std::span<const double> thresholds);
double storage_potential(std::span<const HostRecord> pool, const CapacityFactors& f, const FactorSelection& selection);
double access_rate(std::span<const HostRecord> pool, const CapacityFactors& f, const AccessSource& source);
Histogram make_histogram(std::span<const double> values, std::span<const double> edges, std::string field_name = {});

}  // namespace volpool::reference
