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
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "volpool/histogram.hpp"
#include "volpool/host_model.hpp"
#include "volpool/population.hpp"

namespace volpool {

inline constexpr std::array<std::string_view, 22> kHostColumns = {
    "host_id",         "user_id",          "n_cpus",          "flops_per_cpu_gflops", "iops_per_cpu_giops",
    "ram_mb",          "swap_gb",          "disk_total_gb",   "disk_free_gb",         "throughput_down_kbps",
    "on_fraction",     "connected_fraction", "active_fraction", "cpu_efficiency",     "cpu_vendor",
    "os",              "country",          "venue",           "tz_offset_s",          "created_utc",
    "last_contact_utc", "resource_share"};

struct Reject {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct ParseResult {
  std::vector<HostRecord> records;
  std::vector<Reject> rejects;
};

/// Streams a host CSV. Missing header, unknown or missing columns throw Error;
/// bad rows become rejects.
ParseResult parse_hosts(std::istream& in);
ParseResult parse_hosts_file(const std::string& path);

void serialize_hosts(std::ostream& out, std::span<const HostRecord> records);
void serialize_rejects(std::ostream& out, std::span<const Reject> rejects);

enum class BreakdownKey { CpuVendor, Os, OsFamily, Country, Venue };

std::string_view to_string(BreakdownKey key);
std::optional<BreakdownKey> parse_breakdown_key(std::string_view s);
std::string breakdown_label(const HostRecord& host, BreakdownKey key);

struct BreakdownRow {
  std::string key;
  std::size_t n_hosts = 0;
  double mean_flops = 0.0;  // GFLOPS per host
  double total_flops = 0.0;
  double mean_disk_free = 0.0;    // GB
  double mean_throughput = 0.0;   // Kbps

  bool is_total() const { return key == "Total"; }
};

/// One row per category sorted by n_hosts descending (ties by key), Total last.
std::vector<BreakdownRow> breakdown(std::span<const HostRecord> records, BreakdownKey key);

struct UserBucketRow {
  std::string bucket;
  std::size_t n_users = 0;
  std::size_t n_hosts = 0;
  double pct_hosts = 0.0;
};

std::vector<UserBucketRow> hosts_per_user(std::span<const HostRecord> records);

Histogram histogram(std::span<const HostRecord> records, HostField field, std::span<const double> bin_edges);

void write_breakdown_csv(std::ostream& out, std::span<const BreakdownRow> rows);
void write_hosts_per_user_csv(std::ostream& out, std::span<const UserBucketRow> rows);
void write_histogram_csv(std::ostream& out, const Histogram& h);

/// Shortest round-trip text for a double.
std::string format_double(double v);

namespace reference {
std::vector<BreakdownRow> breakdown(std::span<const HostRecord> records, BreakdownKey key);
}

}  // namespace volpool
