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

#include "volpool/host_model.hpp"

#include <cmath>

#include "volpool/error.hpp"
#include "volpool/units.hpp"

namespace volpool {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

bool valid_range(const HourRange& r) {
  return r.start >= 0.0 && r.start < 24.0 && r.end >= 0.0 && r.end <= 24.0;
}

}  // namespace

std::string_view to_string(CpuVendor v) {
  switch (v) {
    case CpuVendor::Intel: return "Intel";
    case CpuVendor::AMD: return "AMD";
    case CpuVendor::PowerPC: return "PowerPC";
    case CpuVendor::SPARC: return "SPARC";
    case CpuVendor::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(Os os) {
  switch (os) {
    case Os::WindowsXP: return "Windows XP";
    case Os::Windows2000: return "Windows 2000";
    case Os::Windows2003: return "Windows 2003";
    case Os::Windows98: return "Windows 98";
    case Os::WindowsMillennium: return "Windows Millennium";
    case Os::WindowsNT: return "Windows NT";
    case Os::WindowsLonghorn: return "Windows Longhorn";
    case Os::Windows95: return "Windows 95";
    case Os::Linux: return "Linux";
    case Os::Darwin: return "Darwin";
    case Os::SunOS: return "SunOS";
    case Os::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(Venue v) {
  switch (v) {
    case Venue::Home: return "Home";
    case Venue::Work: return "Work";
    case Venue::School: return "School";
    case Venue::None: return "None";
  }
  return "None";
}

std::string_view os_family(Os os) {
  switch (os) {
    case Os::Linux:
    case Os::Darwin:
    case Os::SunOS:
    case Os::Other: return to_string(os);
    default: return "Windows";
  }
}

std::optional<CpuVendor> parse_vendor(std::string_view s) {
  for (auto v : kAllVendors)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<Os> parse_os(std::string_view s) {
  for (auto os : kAllOs)
    if (to_string(os) == s) return os;
  return std::nullopt;
}

std::optional<Venue> parse_venue(std::string_view s) {
  for (auto v : kAllVenues)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

bool HourRange::contains(double hour) const {
  if (start < end) return hour >= start && hour < end;
  if (start > end) return hour >= start || hour < end;
  return false;
}

double HourRange::length() const {
  if (start <= end) return end - start;
  return units::kHoursPerDay - start + end;
}

void Preferences::validate() const {
  require(min_connection_interval_days >= 0.0, "min_connection_interval must be >= 0");
  require(disk_access_interval_s >= 0.0, "disk_access_interval must be >= 0");
  require(disk_max_percent >= 0.0 && disk_max_percent <= 100.0, "disk_max_percent out of [0,100]");
  require(disk_max_used_gb >= 0.0 && disk_min_free_gb >= 0.0, "disk limits must be >= 0");
  require(!active_hours || valid_range(*active_hours), "active_hours outside [0,24)");
  require(!comm_hours || valid_range(*comm_hours), "comm_hours outside [0,24)");
}

std::string HostRecord::check() const {
  if (n_cpus < 1) return "n_cpus must be >= 1";
  const std::pair<double, const char*> sizes[] = {
      {flops_per_cpu, "flops_per_cpu"},   {iops_per_cpu, "iops_per_cpu"}, {ram_mb, "ram"},
      {swap_gb, "swap"},                  {disk_total_gb, "disk_total"},  {disk_free_gb, "disk_free"},
      {throughput_down_kbps, "throughput_down"}};
  for (const auto& [v, name] : sizes)
    if (!(v >= 0.0) || !std::isfinite(v)) return std::string(name) + " must be a finite value >= 0";
  const std::pair<double, const char*> fractions[] = {{on_fraction, "on_fraction"},
                                                      {connected_fraction, "connected_fraction"},
                                                      {active_fraction, "active_fraction"},
                                                      {cpu_efficiency, "cpu_efficiency"},
                                                      {resource_share, "resource_share"}};
  for (const auto& [v, name] : fractions)
    if (!in_unit(v)) return std::string(name) + " out of [0,1]";
  if (disk_free_gb > disk_total_gb) return "disk_free exceeds disk_total";
  if (last_contact_utc < created_utc) return "last_contact precedes created";
  try {
    preferences.validate();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

void HostRecord::validate() const {
  auto msg = check();
  if (!msg.empty()) throw Error("host " + host_id + ": " + msg);
}

bool compute_allowed(const Preferences& prefs, const HostClock& clock) {
  if (clock.suspended) return false;
  if (clock.user_active && !prefs.run_if_active) return false;
  if (prefs.active_hours && !prefs.active_hours->contains(clock.local_hour)) return false;
  return true;
}

bool comm_allowed(const Preferences& prefs, const HostClock& clock) {
  if (!compute_allowed(prefs, clock)) return false;
  return !prefs.comm_hours || prefs.comm_hours->contains(clock.local_hour);
}

double field_value(const HostRecord& h, HostField field) {
  switch (field) {
    case HostField::NCpus: return h.n_cpus;
    case HostField::FlopsPerCpu: return h.flops_per_cpu;
    case HostField::IopsPerCpu: return h.iops_per_cpu;
    case HostField::Ram: return h.ram_mb;
    case HostField::Swap: return h.swap_gb;
    case HostField::DiskTotal: return h.disk_total_gb;
    case HostField::DiskFree: return h.disk_free_gb;
    case HostField::Throughput: return h.throughput_down_kbps;
    case HostField::OnFraction: return h.on_fraction;
    case HostField::ConnectedFraction: return h.connected_fraction;
    case HostField::ActiveFraction: return h.active_fraction;
    case HostField::CpuEfficiency: return h.cpu_efficiency;
    case HostField::TzOffset: return static_cast<double>(h.tz_offset_s);
    case HostField::ResourceShare: return h.resource_share;
    case HostField::HostFlops: return whole_host_flops(h);
    case HostField::LifetimeDays:
      return static_cast<double>(h.last_contact_utc - h.created_utc) / units::kSecondsPerDay;
  }
  return 0.0;
}

namespace {

struct FieldName {
  HostField field;
  std::string_view name;
  std::string_view column;
};

constexpr FieldName kFieldNames[] = {
    {HostField::NCpus, "n_cpus", "n_cpus"},
    {HostField::FlopsPerCpu, "flops_per_cpu", "flops_per_cpu_gflops"},
    {HostField::IopsPerCpu, "iops_per_cpu", "iops_per_cpu_giops"},
    {HostField::Ram, "ram", "ram_mb"},
    {HostField::Swap, "swap", "swap_gb"},
    {HostField::DiskTotal, "disk_total", "disk_total_gb"},
    {HostField::DiskFree, "disk_free", "disk_free_gb"},
    {HostField::Throughput, "throughput", "throughput_down_kbps"},
    {HostField::OnFraction, "on_fraction", "on_fraction"},
    {HostField::ConnectedFraction, "connected_fraction", "connected_fraction"},
    {HostField::ActiveFraction, "active_fraction", "active_fraction"},
    {HostField::CpuEfficiency, "cpu_efficiency", "cpu_efficiency"},
    {HostField::TzOffset, "tz", "tz_offset_s"},
    {HostField::ResourceShare, "resource_share", "resource_share"},
    {HostField::HostFlops, "flops", "host_gflops"},
    {HostField::LifetimeDays, "lifetime", "lifetime_days"},
};

}  // namespace

std::string_view to_string(HostField field) {
  for (const auto& f : kFieldNames)
    if (f.field == field) return f.name;
  return "?";
}

std::optional<HostField> parse_field(std::string_view s) {
  for (const auto& f : kFieldNames)
    if (f.name == s || f.column == s) return f.field;
  return std::nullopt;
}

}  // namespace volpool
