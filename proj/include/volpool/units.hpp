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

// Decimal units everywhere: K = 1e3, M = 1e6, G = 1e9.

namespace volpool::units {

inline constexpr double kKilo = 1e3;
inline constexpr double kMega = 1e6;
inline constexpr double kGiga = 1e9;
inline constexpr double kPeta = 1e15;

inline constexpr double kBitsPerByte = 8.0;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kHoursPerDay = 24.0;

/// One hour of CPU time on a 1 GFLOPS machine; the quantum the data rate R is
/// expressed against (MB of input per this many FLOP).
inline constexpr double kReferenceFlop = kGiga * kSecondsPerHour;

inline constexpr double kbps_to_mbps(double kbps) { return kbps * kKilo / kMega; }

/// Megabytes moved in one hour by a 1 Mbps link (decimal units).
inline constexpr double megabytes_per_hour_per_mbps() {
  return kMega * kSecondsPerHour / kBitsPerByte / kMega;
}

/// Megabytes per day for a link of `kbps` kilobits per second.
inline constexpr double kbps_to_mb_per_day(double kbps) {
  return kbps * kKilo * kSecondsPerDay / kBitsPerByte / kMega;
}

inline constexpr double kbps_to_bytes_per_second(double kbps) { return kbps * kKilo / kBitsPerByte; }

/// FLOP executed in one day at `gflops`.
inline constexpr double gflops_to_flop_per_day(double gflops) { return gflops * kGiga * kSecondsPerDay; }

}  // namespace volpool::units
