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

#include "volpool/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "volpool/error.hpp"
#include "volpool/units.hpp"

namespace volpool {

// ---------------------------------------------------------------------------
// EmpiricalDistribution

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples, std::string field_name)
    : sorted_(std::move(samples)), field_name_(std::move(field_name)) {
  require(!sorted_.empty(), "no data");
  for (double v : sorted_) require(std::isfinite(v), "non-finite sample in " + field_name_);
  std::sort(sorted_.begin(), sorted_.end());
  mean_ = std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double u, bool interpolate) const {
  const std::size_t n = sorted_.size();
  u = std::clamp(u, 0.0, 1.0);
  if (!interpolate || n == 1) {
    auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
    return sorted_[std::min(idx, n - 1)];
  }
  const double pos = u * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted_[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted_[lo] + frac * (sorted_[lo + 1] - sorted_[lo]);
}

EmpiricalDistribution fit_empirical(std::span<const HostRecord> records, HostField field) {
  if (records.empty()) throw Error("no data");
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& h : records) values.push_back(field_value(h, field));
  return EmpiricalDistribution(std::move(values), std::string(to_string(field)));
}

// ---------------------------------------------------------------------------
// FieldGenerator

namespace {

std::size_t pick_index(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  // Rounding at the top end: fall back to the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

void check_weights(std::span<const double> weights, const std::string& what) {
  require(!weights.empty(), what + ": no weights");
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0 && std::isfinite(w), what + ": weights must be non-negative");
    total += w;
  }
  require(total > 0.0, what + ": weights sum to zero");
}

}  // namespace

FieldGenerator FieldGenerator::constant(double value) {
  FieldGenerator g;
  g.kind_ = Kind::Constant;
  g.params_ = {value};
  return g;
}

FieldGenerator FieldGenerator::uniform(double lo, double hi) {
  require(lo <= hi, "uniform generator needs lo <= hi");
  FieldGenerator g;
  g.kind_ = Kind::Uniform;
  g.params_ = {lo, hi};
  return g;
}

FieldGenerator FieldGenerator::exponential(double mean) {
  require(mean >= 0.0, "exponential generator needs mean >= 0");
  FieldGenerator g;
  g.kind_ = Kind::Exponential;
  g.params_ = {mean};
  return g;
}

FieldGenerator FieldGenerator::lognormal(double mean, double cv) {
  require(mean > 0.0 && cv >= 0.0, "lognormal generator needs mean > 0 and cv >= 0");
  FieldGenerator g;
  g.kind_ = Kind::LogNormal;
  g.params_ = {mean, cv};
  return g;
}

FieldGenerator FieldGenerator::beta(double mean, double concentration) {
  require(mean >= 0.0 && mean <= 1.0, "beta generator needs mean in [0,1]");
  require(concentration > 0.0, "beta generator needs concentration > 0");
  FieldGenerator g;
  g.kind_ = Kind::Beta;
  g.params_ = {mean, concentration};
  return g;
}

FieldGenerator FieldGenerator::discrete(std::vector<double> values, std::vector<double> weights) {
  require(values.size() == weights.size(), "discrete generator: values/weights size mismatch");
  check_weights(weights, "discrete generator");
  FieldGenerator g;
  g.kind_ = Kind::Discrete;
  g.params_ = std::move(values);
  g.weights_ = std::move(weights);
  return g;
}

FieldGenerator FieldGenerator::empirical(EmpiricalDistribution dist, bool interpolate) {
  FieldGenerator g;
  g.kind_ = Kind::Empirical;
  g.empirical_ = std::move(dist);
  g.interpolate_ = interpolate;
  return g;
}

FieldGenerator FieldGenerator::mixture(std::vector<FieldGenerator> components, std::vector<double> weights) {
  require(components.size() == weights.size(), "mixture generator: components/weights size mismatch");
  check_weights(weights, "mixture generator");
  FieldGenerator g;
  g.kind_ = Kind::Mixture;
  g.components_ = std::move(components);
  g.weights_ = std::move(weights);
  return g;
}

double FieldGenerator::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant: return params_[0];
    case Kind::Uniform: return params_[0] + (params_[1] - params_[0]) * uniform01(rng);
    case Kind::Exponential: return volpool::exponential(rng, params_[0]);
    case Kind::LogNormal: {
      const double mean = params_[0], cv = params_[1];
      if (cv == 0.0) return mean;
      const double s2 = std::log1p(cv * cv);
      return std::lognormal_distribution<double>(std::log(mean) - 0.5 * s2, std::sqrt(s2))(rng);
    }
    case Kind::Beta: {
      const double m = params_[0], k = params_[1];
      if (m <= 0.0) return 0.0;
      if (m >= 1.0) return 1.0;
      const double x = std::gamma_distribution<double>(m * k, 1.0)(rng);
      const double y = std::gamma_distribution<double>((1.0 - m) * k, 1.0)(rng);
      return x + y > 0.0 ? x / (x + y) : m;
    }
    case Kind::Discrete: return params_[pick_index(weights_, rng)];
    case Kind::Empirical: return empirical_->sample(rng, interpolate_);
    case Kind::Mixture: return components_[pick_index(weights_, rng)].sample(rng);
  }
  return 0.0;
}

double FieldGenerator::mean() const {
  switch (kind_) {
    case Kind::Constant: return params_[0];
    case Kind::Uniform: return 0.5 * (params_[0] + params_[1]);
    case Kind::Exponential:
    case Kind::LogNormal:
    case Kind::Beta: return params_[0];
    case Kind::Discrete:
    case Kind::Mixture: {
      double total = 0.0, acc = 0.0;
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        total += weights_[i];
        acc += weights_[i] * (kind_ == Kind::Discrete ? params_[i] : components_[i].mean());
      }
      return acc / total;
    }
    case Kind::Empirical: {
      const auto s = empirical_->sorted_samples();
      if (!interpolate_ || s.size() == 1) return empirical_->mean();
      // Mean of the piecewise-linear quantile function.
      const double sum = empirical_->mean() * static_cast<double>(s.size());
      return (sum - 0.5 * (s.front() + s.back())) / static_cast<double>(s.size() - 1);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// User buckets

std::size_t user_bucket_of(std::size_t hosts) {
  if (hosts <= 1) return 0;
  if (hosts <= 10) return 1;
  if (hosts <= 100) return 2;
  if (hosts <= 1000) return 3;
  return 4;
}

std::string_view user_bucket_label(std::size_t bucket) {
  static constexpr std::string_view kLabels[] = {"1", "2-10", "11-100", "101-1000", "1000+"};
  return bucket < kUserBuckets ? kLabels[bucket] : "?";
}

namespace {

// Log-uniform integer size within a bucket's range.
int draw_user_size(std::size_t bucket, Rng& rng) {
  const auto [lo, hi] = kUserBucketRanges[bucket];
  if (lo == hi) return lo;
  const double x = std::exp(std::log(lo) + uniform01(rng) * (std::log(hi + 1.0) - std::log(lo)));
  return std::clamp(static_cast<int>(x), lo, hi);
}

double mean_user_size(std::size_t bucket) {
  const auto [lo, hi] = kUserBucketRanges[bucket];
  if (lo == hi) return lo;
  double acc = 0.0;
  for (int k = lo; k <= hi; ++k) acc += k * std::log((k + 1.0) / k);
  return acc / std::log((hi + 1.0) / lo);
}

std::array<std::size_t, kUserBuckets> largest_remainder(std::size_t n, const HostsPerUserWeights& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::array<std::size_t, kUserBuckets> counts{};
  std::array<double, kUserBuckets> remainders{};
  std::size_t assigned = 0;
  for (std::size_t b = 0; b < kUserBuckets; ++b) {
    const double quota = static_cast<double>(n) * weights[b] / total;
    counts[b] = static_cast<std::size_t>(std::floor(quota));
    remainders[b] = quota - std::floor(quota);
    assigned += counts[b];
  }
  std::array<std::size_t, kUserBuckets> order{0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % kUserBuckets]];
  return counts;
}

void check_user_weights(const HostsPerUserWeights& weights) {
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0 && std::isfinite(w), "hosts_per_user weights must be non-negative");
    total += w;
  }
  require(total > 0.0, "hosts_per_user weights are all zero");
}

}  // namespace

void assign_users(std::vector<HostRecord>& pool, const HostsPerUserWeights& weights, std::uint64_t seed) {
  require(!pool.empty(), "assign_users: empty pool");
  check_user_weights(weights);
  Rng rng(mix_seed(seed, 0x05e5));
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const auto targets = largest_remainder(pool.size(), weights);
  std::size_t cursor = 0;
  std::uint64_t next_user = 0;
  std::size_t carry = 0;
  auto emit_user = [&](std::size_t size) {
    const std::string uid = "u" + std::to_string(next_user++);
    for (std::size_t k = 0; k < size; ++k) pool[order[cursor++]].user_id = uid;
  };

  for (std::size_t b = kUserBuckets; b-- > 1;) {
    std::size_t avail = targets[b] + carry;
    const auto [lo, hi] = kUserBucketRanges[b];
    std::vector<std::size_t> sizes;
    while (avail >= static_cast<std::size_t>(lo)) {
      auto size = std::min<std::size_t>(static_cast<std::size_t>(draw_user_size(b, rng)), avail);
      sizes.push_back(size);
      avail -= size;
    }
    // Top up existing users before demoting the leftovers.
    for (std::size_t i = 0; avail > 0 && i < sizes.size(); ++i) {
      const std::size_t room = static_cast<std::size_t>(hi) - sizes[i];
      const std::size_t add = std::min(room, avail);
      sizes[i] += add;
      avail -= add;
    }
    for (auto s : sizes) emit_user(s);
    carry = avail;
  }
  while (cursor < pool.size()) emit_user(1);
}

UserStream::UserStream(const HostsPerUserWeights& weights, std::uint64_t seed) : rng_(mix_seed(seed, 0x05e6)) {
  check_user_weights(weights);
  for (std::size_t b = 0; b < kUserBuckets; ++b) user_weights_.push_back(weights[b] / mean_user_size(b));
}

std::uint64_t UserStream::next() {
  if (remaining_ == 0) {
    ++current_user_;
    remaining_ = draw_user_size(pick_index(user_weights_, rng_), rng_);
  }
  --remaining_;
  return current_user_;
}

// ---------------------------------------------------------------------------
// PoolSpec / generation

namespace {

template <class T>
void check_categorical(const Weights<T>& w, const std::string& what, std::size_t n_hosts) {
  if (w.empty()) return;
  std::vector<double> values;
  for (const auto& [k, v] : w) values.push_back(v);
  if (n_hosts > 0) check_weights(values, what);
  for (double v : values) require(v >= 0.0, what + ": weights must be non-negative");
}

template <class T>
T pick_category(const Weights<T>& w, Rng& rng, T fallback) {
  if (w.empty()) return fallback;
  std::vector<double> values;
  values.reserve(w.size());
  for (const auto& [k, v] : w) values.push_back(v);
  return w[pick_index(values, rng)].first;
}

double default_field_value(HostField f) {
  switch (f) {
    case HostField::NCpus:
    case HostField::FlopsPerCpu:
    case HostField::OnFraction:
    case HostField::ConnectedFraction:
    case HostField::ActiveFraction:
    case HostField::CpuEfficiency:
    case HostField::ResourceShare: return 1.0;
    default: return 0.0;
  }
}

void set_field(HostRecord& h, HostField f, double v) {
  switch (f) {
    case HostField::NCpus: h.n_cpus = std::max(1, static_cast<int>(std::lround(v))); break;
    case HostField::FlopsPerCpu: h.flops_per_cpu = v; break;
    case HostField::IopsPerCpu: h.iops_per_cpu = v; break;
    case HostField::Ram: h.ram_mb = v; break;
    case HostField::Swap: h.swap_gb = v; break;
    case HostField::DiskTotal: h.disk_total_gb = v; break;
    case HostField::DiskFree: h.disk_free_gb = v; break;
    case HostField::Throughput: h.throughput_down_kbps = v; break;
    case HostField::OnFraction: h.on_fraction = v; break;
    case HostField::ConnectedFraction: h.connected_fraction = v; break;
    case HostField::ActiveFraction: h.active_fraction = v; break;
    case HostField::CpuEfficiency: h.cpu_efficiency = v; break;
    case HostField::TzOffset: h.tz_offset_s = std::llround(v); break;
    case HostField::ResourceShare: h.resource_share = v; break;
    case HostField::HostFlops:
    case HostField::LifetimeDays: throw Error("field " + std::string(to_string(f)) + " is derived, not generated");
  }
}

bool is_generated_field(HostField f) { return f != HostField::HostFlops && f != HostField::LifetimeDays; }

void clamp_host(HostRecord& h) {
  auto unit = [](double& x) { x = std::clamp(x, 0.0, 1.0); };
  auto nonneg = [](double& x) { x = std::max(0.0, x); };
  nonneg(h.flops_per_cpu);
  nonneg(h.iops_per_cpu);
  nonneg(h.ram_mb);
  nonneg(h.swap_gb);
  nonneg(h.disk_total_gb);
  nonneg(h.disk_free_gb);
  nonneg(h.throughput_down_kbps);
  h.disk_free_gb = std::min(h.disk_free_gb, h.disk_total_gb);
  unit(h.on_fraction);
  unit(h.connected_fraction);
  unit(h.active_fraction);
  unit(h.cpu_efficiency);
  unit(h.resource_share);
}

}  // namespace

double PoolSpec::field_mean(HostField field) const {
  if (field == HostField::HostFlops) return mean_host_flops();
  auto it = fields.find(field);
  return it == fields.end() ? default_field_value(field) : it->second.mean();
}

double PoolSpec::mean_host_flops() const {
  if (!vendor_host_flops_mean.empty() && !vendor_weights.empty()) {
    double total = 0.0, acc = 0.0;
    const double base = field_mean(HostField::NCpus) * field_mean(HostField::FlopsPerCpu);
    for (const auto& [v, w] : vendor_weights) {
      auto it = vendor_host_flops_mean.find(v);
      acc += w * (it == vendor_host_flops_mean.end() ? base : it->second);
      total += w;
    }
    return acc / total;
  }
  return field_mean(HostField::NCpus) * field_mean(HostField::FlopsPerCpu);
}

void PoolSpec::validate() const {
  check_categorical(vendor_weights, "vendor weights", n_hosts);
  check_categorical(os_weights, "os weights", n_hosts);
  check_categorical(country_weights, "country weights", n_hosts);
  check_categorical(venue_weights, "venue weights", n_hosts);
  if (n_hosts > 0) check_user_weights(hosts_per_user_weights);
  for (const auto& [f, g] : fields)
    require(is_generated_field(f), "field " + std::string(to_string(f)) + " cannot be generated");
  for (const auto& [v, m] : vendor_host_flops_mean) require(m >= 0.0, "vendor flops mean must be >= 0");
  for (const auto& c : couplings) {
    require(is_generated_field(c.a) && is_generated_field(c.b), "coupling on a derived field");
    require(c.rho >= -1.0 && c.rho <= 1.0, "coupling rho out of [-1,1]");
  }
  require(history_days >= 0.0 && mean_lifetime_days >= 0.0, "history/lifetime must be >= 0");
  const auto& pm = preferences;
  for (double p : {pm.p_run_if_active, pm.p_active_hours, pm.p_comm_hours, pm.p_confirm_before_connect})
    require(p >= 0.0 && p <= 1.0, "preference probabilities must be in [0,1]");
  require(pm.active_hours_length >= 0.0 && pm.active_hours_length <= 24.0, "active_hours_length out of [0,24]");
  require(pm.comm_hours_length >= 0.0 && pm.comm_hours_length <= 24.0, "comm_hours_length out of [0,24]");
  pm.base.validate();
}

PoolSpec PoolSpec::measured_defaults(std::size_t n_hosts, std::uint64_t seed) {
  PoolSpec s;
  s.n_hosts = n_hosts;
  s.seed = seed;
  using G = FieldGenerator;
  // 25% of hosts have 2+ CPUs, 2% have 4+.
  s.fields.emplace(HostField::NCpus, G::discrete({1, 2, 4}, {0.75, 0.23, 0.02}));
  const double mean_cpus = 0.75 + 2 * 0.23 + 4 * 0.02;
  s.fields.emplace(HostField::FlopsPerCpu, G::lognormal(1.613 / mean_cpus, 0.5));
  s.fields.emplace(HostField::IopsPerCpu, G::lognormal(2.5, 0.5));
  s.fields.emplace(HostField::Ram, G::lognormal(819.0, 0.6));
  s.fields.emplace(HostField::Swap, G::lognormal(2.03, 0.8));
  s.fields.emplace(HostField::DiskTotal, G::lognormal(63.0, 0.8));
  // 12.00 PB free over 331,785 hosts.
  s.disk_free_fraction = G::beta(12.00e6 / 331785.0 / 63.0, 3.0);
  s.fields.emplace(HostField::Throughput, G::lognormal(289.0, 1.5));
  s.fields.emplace(HostField::OnFraction, G::beta(0.81, 4.0));
  s.fields.emplace(HostField::ConnectedFraction, G::beta(0.83, 4.0));
  s.fields.emplace(HostField::ActiveFraction, G::beta(0.84, 4.0));
  s.fields.emplace(HostField::CpuEfficiency, G::beta(0.899, 10.0));
  // 16.8% attach to other projects; average share 0.917 overall.
  s.fields.emplace(HostField::ResourceShare,
                   G::mixture({G::constant(1.0), G::beta((0.917 - 0.832) / 0.168, 2.0)}, {0.832, 0.168}));

  s.vendor_weights = {{CpuVendor::Intel, 217278},
                      {CpuVendor::AMD, 95958},
                      {CpuVendor::PowerPC, 15827},
                      {CpuVendor::SPARC, 1035},
                      {CpuVendor::Other, 1687}};
  s.vendor_host_flops_mean = {{CpuVendor::Intel, 1.600},
                              {CpuVendor::AMD, 1.737},
                              {CpuVendor::PowerPC, 1.149},
                              {CpuVendor::SPARC, 0.755},
                              {CpuVendor::Other, 1.233}};
  s.os_weights = {{Os::WindowsXP, 229555},      {Os::Windows2000, 42830},  {Os::Windows2003, 10367},
                  {Os::Windows98, 6591},        {Os::WindowsMillennium, 1973}, {Os::WindowsNT, 1249},
                  {Os::WindowsLonghorn, 86},    {Os::Windows95, 37},       {Os::Linux, 21042},
                  {Os::Darwin, 15830},          {Os::SunOS, 1091},         {Os::Other, 1134}};
  s.country_weights = {{"USA", 131916},      {"Germany", 33236}, {"UK", 23638},       {"Canada", 14821},
                       {"Japan", 12931},     {"France", 9412},   {"Australia", 7747}, {"Italy", 6921},
                       {"Netherlands", 6609}, {"Spain", 6418}};
  double listed = 0.0;
  for (const auto& [c, w] : s.country_weights) listed += w;
  s.country_weights.emplace_back("Other", 331785.0 - listed);
  s.venue_weights = {{Venue::Home, 187742}, {Venue::Work, 52484}, {Venue::School, 12023}, {Venue::None, 79535}};
  s.hosts_per_user_weights = {137601, 146788, 36828, 5799, 4770};

  s.country_tz_hours = {{"USA", G::discrete({-5, -6, -7, -8}, {0.47, 0.29, 0.07, 0.17})},
                        {"Germany", G::constant(1)},
                        {"UK", G::constant(0)},
                        {"Canada", G::discrete({-5, -6, -7, -8, -4}, {0.6, 0.1, 0.1, 0.15, 0.05})},
                        {"Japan", G::constant(9)},
                        {"France", G::constant(1)},
                        {"Australia", G::discrete({10, 9.5, 8}, {0.8, 0.1, 0.1})},
                        {"Italy", G::constant(1)},
                        {"Netherlands", G::constant(1)},
                        {"Spain", G::constant(1)}};

  auto& pm = s.preferences;
  pm.p_run_if_active = 0.719;
  pm.p_active_hours = 0.033;
  pm.active_hours_length = 12.41;
  pm.p_comm_hours = 0.008;
  pm.comm_hours_length = 12.18;
  pm.p_confirm_before_connect = 0.084;
  // Most users keep the 0.1 day default; the rest raise the mean to 0.69 days.
  pm.min_connection_interval_days =
      G::mixture({G::constant(0.1), G::exponential((0.69 - 0.8 * 0.1) / 0.2)}, {0.8, 0.2});
  pm.base.disk_max_used_gb = 63.6;
  pm.base.disk_max_percent = 42.6;
  pm.base.disk_min_free_gb = 0.97;
  pm.base.disk_access_interval_s = 78.9;
  return s;
}

PoolGenerator::PoolGenerator(PoolSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  flops_base_mean_ = spec_.field_mean(HostField::NCpus) * spec_.field_mean(HostField::FlopsPerCpu);
}

HostRecord PoolGenerator::host(std::size_t index) const {
  Rng rng = make_rng(spec_.seed, index);
  HostRecord h;
  h.host_id = "h" + std::to_string(index);
  h.user_id = "u" + std::to_string(index);
  h.cpu_vendor = pick_category(spec_.vendor_weights, rng, CpuVendor::Other);
  h.os = pick_category(spec_.os_weights, rng, Os::Other);
  h.country = pick_category(spec_.country_weights, rng, std::string("Other"));
  h.venue = pick_category(spec_.venue_weights, rng, Venue::None);

  static constexpr HostField kOrder[] = {
      HostField::NCpus,          HostField::FlopsPerCpu,      HostField::IopsPerCpu,     HostField::Ram,
      HostField::Swap,           HostField::DiskTotal,        HostField::DiskFree,       HostField::Throughput,
      HostField::OnFraction,     HostField::ConnectedFraction, HostField::ActiveFraction, HostField::CpuEfficiency,
      HostField::ResourceShare,
  };
  for (HostField f : kOrder) {
    if (f == HostField::DiskFree && spec_.disk_free_fraction) {
      h.disk_free_gb = h.disk_total_gb * std::clamp(spec_.disk_free_fraction->sample(rng), 0.0, 1.0);
      continue;
    }
    auto it = spec_.fields.find(f);
    set_field(h, f, it == spec_.fields.end() ? default_field_value(f) : it->second.sample(rng));
  }
  if (auto it = spec_.vendor_host_flops_mean.find(h.cpu_vendor);
      it != spec_.vendor_host_flops_mean.end() && flops_base_mean_ > 0.0)
    h.flops_per_cpu *= it->second / flops_base_mean_;

  if (auto it = spec_.fields.find(HostField::TzOffset); it != spec_.fields.end()) {
    h.tz_offset_s = std::llround(it->second.sample(rng));
  } else if (auto ct = spec_.country_tz_hours.find(h.country); ct != spec_.country_tz_hours.end()) {
    h.tz_offset_s = std::llround(ct->second.sample(rng) * units::kSecondsPerHour);
  } else {
    h.tz_offset_s = std::llround(std::floor(uniform01(rng) * 25.0 - 12.0) * units::kSecondsPerHour);
  }

  const double age_s = uniform01(rng) * spec_.history_days * units::kSecondsPerDay;
  h.created_utc = spec_.now_utc - std::llround(age_s);
  const double life_s = exponential(rng, spec_.mean_lifetime_days) * units::kSecondsPerDay;
  h.last_contact_utc = std::min<std::int64_t>(spec_.now_utc, h.created_utc + std::llround(life_s));

  const auto& pm = spec_.preferences;
  Preferences p = pm.base;
  p.run_if_active = uniform01(rng) < pm.p_run_if_active;
  if (uniform01(rng) < pm.p_active_hours) {
    const double start = std::floor(uniform01(rng) * 24.0);
    p.active_hours = HourRange{start, std::fmod(start + pm.active_hours_length, 24.0)};
  }
  if (uniform01(rng) < pm.p_comm_hours) {
    const double start = std::floor(uniform01(rng) * 24.0);
    p.comm_hours = HourRange{start, std::fmod(start + pm.comm_hours_length, 24.0)};
  }
  p.confirm_before_connect = uniform01(rng) < pm.p_confirm_before_connect;
  p.min_connection_interval_days = std::max(0.0, pm.min_connection_interval_days.sample(rng));
  h.preferences = p;

  clamp_host(h);
  return h;
}

namespace {

void apply_coupling(std::vector<HostRecord>& pool, const RankCoupling& c, Rng& rng) {
  const std::size_t n = pool.size();
  if (n < 2) return;
  std::vector<std::size_t> by_a(n);
  std::iota(by_a.begin(), by_a.end(), std::size_t{0});
  std::stable_sort(by_a.begin(), by_a.end(), [&](std::size_t i, std::size_t j) {
    return field_value(pool[i], c.a) < field_value(pool[j], c.a);
  });
  std::vector<double> score(n);
  const double noise = std::sqrt(std::max(0.0, 1.0 - c.rho * c.rho));
  for (std::size_t r = 0; r < n; ++r)
    score[by_a[r]] = c.rho * (static_cast<double>(r) + 0.5) / static_cast<double>(n) + noise * uniform01(rng);

  std::vector<double> b_values(n);
  for (std::size_t i = 0; i < n; ++i) b_values[i] = field_value(pool[i], c.b);
  std::sort(b_values.begin(), b_values.end());
  std::vector<std::size_t> by_score(n);
  std::iota(by_score.begin(), by_score.end(), std::size_t{0});
  std::stable_sort(by_score.begin(), by_score.end(), [&](std::size_t i, std::size_t j) { return score[i] < score[j]; });
  for (std::size_t r = 0; r < n; ++r) {
    set_field(pool[by_score[r]], c.b, b_values[r]);
    clamp_host(pool[by_score[r]]);
  }
}

}  // namespace

std::vector<HostRecord> generate_pool(const PoolSpec& spec) {
  PoolGenerator gen(spec);
  std::vector<HostRecord> pool;
  pool.reserve(spec.n_hosts);
  for (std::size_t i = 0; i < spec.n_hosts; ++i) pool.push_back(gen.host(i));
  if (pool.empty()) return pool;
  assign_users(pool, spec.hosts_per_user_weights, spec.seed);
  Rng rng(mix_seed(spec.seed, 0xc0c0));
  for (const auto& c : spec.couplings) apply_coupling(pool, c, rng);
  return pool;
}

// ---------------------------------------------------------------------------
// Churn and lifetimes

LifetimeStats lifetime_stats(std::span<const HostRecord> records, std::int64_t now_utc,
                             std::span<const double> bin_edges_days) {
  std::vector<double> lifetimes;
  for (const auto& h : records)
    if (now_utc - h.last_contact_utc >= kCensorWindowS) lifetimes.push_back(field_value(h, HostField::LifetimeDays));
  if (lifetimes.empty()) throw Error("all hosts censored");

  std::vector<double> default_edges;
  if (bin_edges_days.empty()) {
    for (int d = 0; d <= 720; d += 30) default_edges.push_back(d);
    bin_edges_days = default_edges;
  }
  LifetimeStats out;
  out.n_qualifying = lifetimes.size();
  out.mean_days = std::accumulate(lifetimes.begin(), lifetimes.end(), 0.0) / static_cast<double>(lifetimes.size());
  out.histogram = make_histogram(lifetimes, bin_edges_days, "lifetime");
  return out;
}

void ChurnModel::validate() const {
  require(!arrivals.empty(), "churn: no arrival segments");
  require(arrivals.front().start_day == 0.0, "churn: first arrival segment must start at day 0");
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    require(arrivals[i].rate_per_day >= 0.0 && std::isfinite(arrivals[i].rate_per_day), "churn: arrival rate must be >= 0");
    if (i > 0) require(arrivals[i].start_day > arrivals[i - 1].start_day, "churn: segments must be ascending");
  }
  switch (lifetime_kind) {
    case LifetimeKind::Exponential:
    case LifetimeKind::Constant: require(lifetime_mean_days > 0.0, "churn: lifetime mean must be > 0"); break;
    case LifetimeKind::Empirical:
      require(lifetime_empirical.has_value(), "churn: empirical lifetime needs samples");
      require(lifetime_empirical->sorted_samples().front() > 0.0, "churn: lifetime samples must be > 0");
      break;
  }
}

double ChurnModel::rate_at(double day) const {
  double rate = 0.0;
  for (const auto& s : arrivals) {
    if (s.start_day > day) break;
    rate = s.rate_per_day;
  }
  return rate;
}

double ChurnModel::mean_rate(double duration_days) const {
  if (duration_days <= 0.0) return rate_at(0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const double start = arrivals[i].start_day;
    if (start >= duration_days) break;
    const double end = i + 1 < arrivals.size() ? std::min(arrivals[i + 1].start_day, duration_days) : duration_days;
    acc += arrivals[i].rate_per_day * (end - start);
  }
  return acc / duration_days;
}

double ChurnModel::mean_lifetime() const {
  return lifetime_kind == LifetimeKind::Empirical ? lifetime_empirical->mean() : lifetime_mean_days;
}

double ChurnModel::sample_lifetime(Rng& rng) const {
  switch (lifetime_kind) {
    case LifetimeKind::Exponential: return exponential(rng, lifetime_mean_days);
    case LifetimeKind::Constant: return lifetime_mean_days;
    case LifetimeKind::Empirical: return lifetime_empirical->sample(rng);
  }
  return lifetime_mean_days;
}

double ChurnModel::sample_residual_lifetime(Rng& rng) const {
  switch (lifetime_kind) {
    case LifetimeKind::Exponential: return exponential(rng, lifetime_mean_days);
    case LifetimeKind::Constant: return uniform01(rng) * lifetime_mean_days;
    case LifetimeKind::Empirical: {
      // Length-biased pick, then a uniform point within that lifetime.
      auto s = lifetime_empirical->sorted_samples();
      std::vector<double> w(s.begin(), s.end());
      const double life = s[pick_index(w, rng)];
      return uniform01(rng) * life;
    }
  }
  return 0.0;
}

double ChurnModel::next_arrival(double day, Rng& rng) const {
  double t = day;
  for (;;) {
    std::size_t seg = 0;
    for (std::size_t i = 0; i < arrivals.size(); ++i)
      if (arrivals[i].start_day <= t) seg = i;
    const double seg_end =
        seg + 1 < arrivals.size() ? arrivals[seg + 1].start_day : std::numeric_limits<double>::infinity();
    const double rate = arrivals[seg].rate_per_day;
    if (rate > 0.0) {
      const double candidate = t + exponential(rng, 1.0 / rate);
      if (candidate < seg_end) return candidate;
    }
    if (!std::isfinite(seg_end)) return std::numeric_limits<double>::infinity();
    t = seg_end;
  }
}

}  // namespace volpool
