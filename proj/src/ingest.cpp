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


#include "volpool/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "volpool/error.hpp"
#include "volpool/parallel.hpp"

namespace volpool {

namespace {

constexpr std::size_t kNumColumns = kHostColumns.size();

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string quote_csv(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

bool is_comment_or_blank(std::string_view line) {
  const auto pos = line.find_first_not_of(" \t");
  return pos == std::string_view::npos || line[pos] == '#';
}

// Column order of the file mapped onto the canonical column index.
std::vector<std::size_t> map_header(const std::string& line) {
  auto names = split_csv(line);
  std::vector<std::size_t> order;
  std::array<bool, kNumColumns> seen{};
  for (const auto& name : names) {
    auto it = std::find(kHostColumns.begin(), kHostColumns.end(), name);
    require(it != kHostColumns.end(), "unknown column '" + name + "'");
    const auto idx = static_cast<std::size_t>(it - kHostColumns.begin());
    require(!seen[idx], "duplicate column '" + name + "'");
    seen[idx] = true;
    order.push_back(idx);
  }
  for (std::size_t i = 0; i < kNumColumns; ++i)
    require(seen[i], "missing column '" + std::string(kHostColumns[i]) + "'");
  return order;
}

std::string parse_row(const std::vector<std::string>& cells, const std::vector<std::size_t>& order,
                      HostRecord& rec) {
  if (cells.size() != order.size())
    return "expected " + std::to_string(order.size()) + " fields, got " + std::to_string(cells.size());
  std::array<std::string_view, kNumColumns> v;
  for (std::size_t i = 0; i < order.size(); ++i) v[order[i]] = cells[i];

  auto num = [&](std::size_t col, auto& out) -> bool { return parse_number(v[col], out); };
  rec.host_id = std::string(v[0]);
  rec.user_id = std::string(v[1]);
  if (!num(2, rec.n_cpus)) return "bad value for n_cpus";
  double* doubles[] = {&rec.flops_per_cpu,       &rec.iops_per_cpu,       &rec.ram_mb,
                       &rec.swap_gb,             &rec.disk_total_gb,      &rec.disk_free_gb,
                       &rec.throughput_down_kbps, &rec.on_fraction,       &rec.connected_fraction,
                       &rec.active_fraction,      &rec.cpu_efficiency};
  for (std::size_t k = 0; k < std::size(doubles); ++k)
    if (!num(3 + k, *doubles[k])) return "bad value for " + std::string(kHostColumns[3 + k]);
  auto vendor = parse_vendor(v[14]);
  if (!vendor) return "unknown cpu_vendor '" + std::string(v[14]) + "'";
  rec.cpu_vendor = *vendor;
  auto os = parse_os(v[15]);
  if (!os) return "unknown os '" + std::string(v[15]) + "'";
  rec.os = *os;
  rec.country = std::string(v[16]);
  auto venue = parse_venue(v[17]);
  if (!venue) return "unknown venue '" + std::string(v[17]) + "'";
  rec.venue = *venue;
  if (!num(18, rec.tz_offset_s)) return "bad value for tz_offset_s";
  if (!num(19, rec.created_utc)) return "bad value for created_utc";
  if (!num(20, rec.last_contact_utc)) return "bad value for last_contact_utc";
  if (!num(21, rec.resource_share)) return "bad value for resource_share";
  return rec.check();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

ParseResult parse_hosts(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> order;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment_or_blank(line)) continue;
    if (!have_header) {
      order = map_header(line);
      have_header = true;
      continue;
    }
    HostRecord rec;
    auto reason = parse_row(split_csv(line), order, rec);
    if (reason.empty())
      result.records.push_back(std::move(rec));
    else
      result.rejects.push_back({line_no, std::move(reason)});
  }
  require(have_header, "missing header");
  return result;
}

ParseResult parse_hosts_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read " + path);
  return parse_hosts(in);
}

void serialize_hosts(std::ostream& out, std::span<const HostRecord> records) {
  for (std::size_t i = 0; i < kNumColumns; ++i) out << (i ? "," : "") << kHostColumns[i];
  out << '\n';
  for (const auto& r : records) {
    out << quote_csv(r.host_id) << ',' << quote_csv(r.user_id) << ',' << r.n_cpus << ','
        << format_double(r.flops_per_cpu) << ',' << format_double(r.iops_per_cpu) << ','
        << format_double(r.ram_mb) << ',' << format_double(r.swap_gb) << ',' << format_double(r.disk_total_gb)
        << ',' << format_double(r.disk_free_gb) << ',' << format_double(r.throughput_down_kbps) << ','
        << format_double(r.on_fraction) << ',' << format_double(r.connected_fraction) << ','
        << format_double(r.active_fraction) << ',' << format_double(r.cpu_efficiency) << ','
        << quote_csv(to_string(r.cpu_vendor)) << ',' << quote_csv(to_string(r.os)) << ','
        << quote_csv(r.country) << ',' << quote_csv(to_string(r.venue)) << ',' << r.tz_offset_s << ','
        << r.created_utc << ',' << r.last_contact_utc << ',' << format_double(r.resource_share) << '\n';
  }
}

void serialize_rejects(std::ostream& out, std::span<const Reject> rejects) {
  out << "line,reason\n";
  for (const auto& r : rejects) out << r.line << ',' << quote_csv(r.reason) << '\n';
}

std::string_view to_string(BreakdownKey key) {
  switch (key) {
    case BreakdownKey::CpuVendor: return "cpu_vendor";
    case BreakdownKey::Os: return "os";
    case BreakdownKey::OsFamily: return "os_family";
    case BreakdownKey::Country: return "country";
    case BreakdownKey::Venue: return "venue";
  }
  return "?";
}

std::optional<BreakdownKey> parse_breakdown_key(std::string_view s) {
  for (auto k : {BreakdownKey::CpuVendor, BreakdownKey::Os, BreakdownKey::OsFamily, BreakdownKey::Country,
                 BreakdownKey::Venue})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string breakdown_label(const HostRecord& host, BreakdownKey key) {
  switch (key) {
    case BreakdownKey::CpuVendor: return std::string(to_string(host.cpu_vendor));
    case BreakdownKey::Os: return std::string(to_string(host.os));
    case BreakdownKey::OsFamily: return std::string(os_family(host.os));
    case BreakdownKey::Country: return host.country;
    case BreakdownKey::Venue: return std::string(to_string(host.venue));
  }
  return {};
}

namespace {

struct Acc {
  std::size_t n = 0;
  double flops = 0.0;
  double disk_free = 0.0;
  double throughput = 0.0;

  void add(const HostRecord& h) {
    ++n;
    flops += whole_host_flops(h);
    disk_free += h.disk_free_gb;
    throughput += h.throughput_down_kbps;
  }
  void merge(const Acc& o) {
    n += o.n;
    flops += o.flops;
    disk_free += o.disk_free;
    throughput += o.throughput;
  }
  BreakdownRow row(std::string key) const {
    BreakdownRow r;
    r.key = std::move(key);
    r.n_hosts = n;
    r.total_flops = flops;
    if (n > 0) {
      const auto dn = static_cast<double>(n);
      r.mean_flops = flops / dn;
      r.mean_disk_free = disk_free / dn;
      r.mean_throughput = throughput / dn;
    }
    return r;
  }
};

struct Partial {
  std::map<std::string, Acc> groups;
  Acc total;
};

std::vector<BreakdownRow> finish(const std::map<std::string, Acc>& groups, const Acc& total) {
  std::vector<BreakdownRow> rows;
  rows.reserve(groups.size() + 1);
  for (const auto& [key, acc] : groups) rows.push_back(acc.row(key));
  std::stable_sort(rows.begin(), rows.end(),
                   [](const BreakdownRow& a, const BreakdownRow& b) { return a.n_hosts > b.n_hosts; });
  rows.push_back(total.row("Total"));
  return rows;
}

}  // namespace

std::vector<BreakdownRow> breakdown(std::span<const HostRecord> records, BreakdownKey key) {
  auto partials = parallel::map_chunks<Partial>(records.size(), [&](std::size_t b, std::size_t e) {
    Partial p;
    for (std::size_t i = b; i < e; ++i) {
      p.groups[breakdown_label(records[i], key)].add(records[i]);
      p.total.add(records[i]);
    }
    return p;
  });
  std::map<std::string, Acc> groups;
  Acc total;
  for (const auto& p : partials) {
    for (const auto& [k, acc] : p.groups) groups[k].merge(acc);
    total.merge(p.total);
  }
  return finish(groups, total);
}

std::vector<BreakdownRow> reference::breakdown(std::span<const HostRecord> records, BreakdownKey key) {
  std::map<std::string, Acc> groups;
  Acc total;
  for (const auto& h : records) {
    groups[breakdown_label(h, key)].add(h);
    total.add(h);
  }
  return finish(groups, total);
}

std::vector<UserBucketRow> hosts_per_user(std::span<const HostRecord> records) {
  std::unordered_map<std::string, std::size_t> per_user;
  for (const auto& h : records) ++per_user[h.user_id];
  std::vector<UserBucketRow> rows(kUserBuckets);
  for (std::size_t b = 0; b < kUserBuckets; ++b) rows[b].bucket = std::string(user_bucket_label(b));
  for (const auto& [user, n] : per_user) {
    auto& row = rows[user_bucket_of(n)];
    ++row.n_users;
    row.n_hosts += n;
  }
  if (!records.empty())
    for (auto& row : rows)
      row.pct_hosts = 100.0 * static_cast<double>(row.n_hosts) / static_cast<double>(records.size());
  return rows;
}

Histogram histogram(std::span<const HostRecord> records, HostField field, std::span<const double> bin_edges) {
  check_bin_edges(bin_edges);
  std::vector<double> values(records.size());
  const auto n = static_cast<long long>(records.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    values[static_cast<std::size_t>(i)] = field_value(records[static_cast<std::size_t>(i)], field);
  return make_histogram(values, bin_edges, std::string(to_string(field)));
}

void write_breakdown_csv(std::ostream& out, std::span<const BreakdownRow> rows) {
  out << "key,n_hosts,mean_flops,total_flops,mean_disk_free,mean_throughput\n";
  for (const auto& r : rows)
    out << quote_csv(r.key) << ',' << r.n_hosts << ',' << format_double(r.mean_flops) << ','
        << format_double(r.total_flops) << ',' << format_double(r.mean_disk_free) << ','
        << format_double(r.mean_throughput) << '\n';
}

void write_hosts_per_user_csv(std::ostream& out, std::span<const UserBucketRow> rows) {
  out << "bucket,n_users,n_hosts,pct_hosts\n";
  for (const auto& r : rows)
    out << r.bucket << ',' << r.n_users << ',' << r.n_hosts << ',' << format_double(r.pct_hosts) << '\n';
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin,bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << i << ',' << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1]) << ','
        << h.counts[i] << '\n';
  out << "overflow,,," << h.overflow << '\n';
  out << "non_finite,,," << h.non_finite << '\n';
}

}  // namespace volpool
