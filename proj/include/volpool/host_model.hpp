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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace volpool {

enum class CpuVendor { Intel, AMD, PowerPC, SPARC, Other };

// Windows is split by version; the label carries the family as a prefix.
enum class Os {
  WindowsXP,
  Windows2000,
  Windows2003,
  Windows98,
  WindowsMillennium,
  WindowsNT,
  WindowsLonghorn,
  Windows95,
  Linux,
  Darwin,
  SunOS,
  Other
};

enum class Venue { Home, Work, School, None };

inline constexpr std::array<CpuVendor, 5> kAllVendors = {CpuVendor::Intel, CpuVendor::AMD, CpuVendor::PowerPC,
                                                         CpuVendor::SPARC, CpuVendor::Other};
inline constexpr std::array<Os, 12> kAllOs = {Os::WindowsXP,       Os::Windows2000,     Os::Windows2003,
                                              Os::Windows98,       Os::WindowsMillennium, Os::WindowsNT,
                                              Os::WindowsLonghorn, Os::Windows95,       Os::Linux,
                                              Os::Darwin,          Os::SunOS,           Os::Other};
inline constexpr std::array<Venue, 4> kAllVenues = {Venue::Home, Venue::Work, Venue::School, Venue::None};

std::string_view to_string(CpuVendor v);
std::string_view to_string(Os os);
std::string_view to_string(Venue v);
/// "Windows" for every Windows version, otherwise the OS label itself.
std::string_view os_family(Os os);

std::optional<CpuVendor> parse_vendor(std::string_view s);
std::optional<Os> parse_os(std::string_view s);
std::optional<Venue> parse_venue(std::string_view s);

/// Daily interval [start, end) in local hours. start > end wraps past midnight;
/// start == end is an empty window.
struct HourRange {
  double start = 0.0;
  double end = 24.0;

  bool contains(double hour) const;
  double length() const;

  friend bool operator==(const HourRange&, const HourRange&) = default;
};

struct Preferences {
  bool run_if_active = false;
  std::optional<HourRange> active_hours;
  std::optional<HourRange> comm_hours;
  bool confirm_before_connect = false;
  double min_connection_interval_days = 0.1;
  double disk_access_interval_s = 60.0;
  double disk_max_used_gb = 100.0;
  double disk_max_percent = 50.0;
  double disk_min_free_gb = 0.1;

  /// Throws Error on the first violated invariant.
  void validate() const;

  friend bool operator==(const Preferences&, const Preferences&) = default;
};

struct HostClock {
  double local_hour = 0.0;  // [0, 24)
  bool user_active = false;
  bool suspended = false;
};

struct HostRecord {
  std::string host_id;
  std::string user_id;
  int n_cpus = 1;
  double flops_per_cpu = 0.0;  // GFLOPS, benchmarked with every CPU loaded
  double iops_per_cpu = 0.0;   // GIOPS
  double ram_mb = 0.0;
  double swap_gb = 0.0;
  double disk_total_gb = 0.0;
  double disk_free_gb = 0.0;
  double throughput_down_kbps = 0.0;
  double on_fraction = 1.0;
  double connected_fraction = 1.0;
  double active_fraction = 1.0;
  double cpu_efficiency = 1.0;
  CpuVendor cpu_vendor = CpuVendor::Other;
  Os os = Os::Other;
  std::string country;
  Venue venue = Venue::None;
  std::int64_t tz_offset_s = 0;
  std::int64_t created_utc = 0;
  std::int64_t last_contact_utc = 0;
  double resource_share = 1.0;
  Preferences preferences;

  /// Returns an empty string when every invariant holds, else the first failed check.
  std::string check() const;
  void validate() const;

  friend bool operator==(const HostRecord&, const HostRecord&) = default;
};

/// Whole-host GFLOPS: n_cpus times the per-CPU benchmark.
inline double whole_host_flops(const HostRecord& host) { return host.n_cpus * host.flops_per_cpu; }

bool compute_allowed(const Preferences& prefs, const HostClock& clock);
/// compute_allowed, further restricted by comm_hours when set.
bool comm_allowed(const Preferences& prefs, const HostClock& clock);

/// Numeric views of a host record, for fitting, histograms and aggregates.
enum class HostField {
  NCpus,
  FlopsPerCpu,
  IopsPerCpu,
  Ram,
  Swap,
  DiskTotal,
  DiskFree,
  Throughput,
  OnFraction,
  ConnectedFraction,
  ActiveFraction,
  CpuEfficiency,
  TzOffset,
  ResourceShare,
  HostFlops,     // n_cpus * flops_per_cpu
  LifetimeDays,  // (last_contact - created) in days
};

double field_value(const HostRecord& host, HostField field);
std::string_view to_string(HostField field);
/// Accepts the short names from to_string() and the host CSV column names.
std::optional<HostField> parse_field(std::string_view s);

}  // namespace volpool
