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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "volpool/histogram.hpp"
#include "volpool/host_model.hpp"
#include "volpool/random.hpp"

namespace volpool {

/// Resampleable distribution over the observed values of one field.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(std::vector<double> samples, std::string field_name);

  /// Inverse CDF at u in [0,1). Plain mode returns a stored sample; interpolated
  /// mode returns a linear blend of adjacent order statistics.
  double quantile(double u, bool interpolate = false) const;
  double sample(Rng& rng, bool interpolate = false) const { return quantile(uniform01(rng), interpolate); }

  double mean() const { return mean_; }
  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted_samples() const { return sorted_; }
  const std::string& field_name() const { return field_name_; }

 private:
  std::vector<double> sorted_;
  std::string field_name_;
  double mean_ = 0.0;
};

/// Throws Error("no data") on an empty record set.
EmpiricalDistribution fit_empirical(std::span<const HostRecord> records, HostField field);

/// Marginal generator for one numeric field.
class FieldGenerator {
 public:
  enum class Kind { Constant, Uniform, Exponential, LogNormal, Beta, Discrete, Empirical, Mixture };

  static FieldGenerator constant(double value);
  static FieldGenerator uniform(double lo, double hi);
  static FieldGenerator exponential(double mean);
  /// Parameterized by its mean and coefficient of variation.
  static FieldGenerator lognormal(double mean, double cv);
  /// Beta on [0,1] with the given mean; `concentration` = a + b.
  static FieldGenerator beta(double mean, double concentration);
  static FieldGenerator discrete(std::vector<double> values, std::vector<double> weights);
  static FieldGenerator empirical(EmpiricalDistribution dist, bool interpolate = false);
  static FieldGenerator mixture(std::vector<FieldGenerator> components, std::vector<double> weights);

  double sample(Rng& rng) const;
  double mean() const;
  Kind kind() const { return kind_; }

  // Accessors for serialization.
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<FieldGenerator>& components() const { return components_; }
  const std::optional<EmpiricalDistribution>& empirical_dist() const { return empirical_; }
  bool interpolate() const { return interpolate_; }

 private:
  Kind kind_ = Kind::Constant;
  std::vector<double> params_;
  std::vector<double> weights_;
  std::vector<FieldGenerator> components_;
  std::optional<EmpiricalDistribution> empirical_;
  bool interpolate_ = false;
};

template <class T>
using Weights = std::vector<std::pair<T, double>>;

/// Host-per-user buckets: 1, 2-10, 11-100, 101-1000, 1000+.
inline constexpr std::size_t kUserBuckets = 5;
struct UserBucket {
  int lo;
  int hi;
};
inline constexpr std::array<UserBucket, kUserBuckets> kUserBucketRanges = {
    {{1, 1}, {2, 10}, {11, 100}, {101, 1000}, {1001, 3000}}};
std::size_t user_bucket_of(std::size_t hosts);
std::string_view user_bucket_label(std::size_t bucket);

/// Weights over the buckets, as shares of hosts (not users).
using HostsPerUserWeights = std::array<double, kUserBuckets>;

struct PreferenceMix {
  double p_run_if_active = 0.0;
  double p_active_hours = 0.0;
  double active_hours_length = 12.41;
  double p_comm_hours = 0.0;
  double comm_hours_length = 12.18;
  double p_confirm_before_connect = 0.0;
  FieldGenerator min_connection_interval_days = FieldGenerator::constant(0.1);
  Preferences base;  // disk limits and other fixed settings
};

/// Rank-coupling of two fields, applied after independent generation.
/// Marginals are preserved exactly; rho in [-1, 1] steers rank correlation.
struct RankCoupling {
  HostField a;
  HostField b;
  double rho = 0.0;
};

struct PoolSpec {
  std::size_t n_hosts = 0;
  std::uint64_t seed = 0;

  std::map<HostField, FieldGenerator> fields;
  /// When set, disk_free = disk_total * fraction, otherwise the DiskFree
  /// generator is used and clamped to disk_total.
  std::optional<FieldGenerator> disk_free_fraction;

  Weights<CpuVendor> vendor_weights;
  Weights<Os> os_weights;
  Weights<std::string> country_weights;
  Weights<Venue> venue_weights;
  HostsPerUserWeights hosts_per_user_weights{1.0, 0.0, 0.0, 0.0, 0.0};

  /// Optional per-vendor mean whole-host GFLOPS; rescales flops_per_cpu.
  std::map<CpuVendor, double> vendor_host_flops_mean;
  /// Hours east of GMT per country; unknown countries draw from -12..12.
  std::map<std::string, FieldGenerator> country_tz_hours;

  PreferenceMix preferences;
  std::vector<RankCoupling> couplings;

  /// Timestamps: hosts are created uniformly in [now - history, now] and live
  /// an exponential lifetime, truncated at now.
  std::int64_t now_utc = 1139529600;  // 2006-02-10
  double history_days = 365.0;
  double mean_lifetime_days = 91.0;

  void validate() const;
  /// Mean whole-host GFLOPS implied by the generators.
  double mean_host_flops() const;
  double field_mean(HostField field) const;

  /// Marginals matching the published host-pool averages.
  static PoolSpec measured_defaults(std::size_t n_hosts, std::uint64_t seed);
};

/// Draws hosts one at a time; host i depends only on (spec, i).
class PoolGenerator {
 public:
  explicit PoolGenerator(PoolSpec spec);
  HostRecord host(std::size_t index) const;
  const PoolSpec& spec() const { return spec_; }

 private:
  PoolSpec spec_;
  double flops_base_mean_ = 0.0;
};

/// Exactly spec.n_hosts records, bit-identical for identical specs. Users are
/// assigned with spec.hosts_per_user_weights.
std::vector<HostRecord> generate_pool(const PoolSpec& spec);

/// Partitions the pool into users so the share of hosts in each bucket matches
/// the weights (largest remainder). Hosts that cannot form a user within their
/// bucket fall through to the next smaller bucket.
void assign_users(std::vector<HostRecord>& pool, const HostsPerUserWeights& weights, std::uint64_t seed);

/// Streams user ids for hosts that arrive over time (simulator).
class UserStream {
 public:
  UserStream(const HostsPerUserWeights& weights, std::uint64_t seed);
  std::uint64_t next();

 private:
  std::vector<double> user_weights_;
  Rng rng_;
  std::uint64_t current_user_ = 0;
  int remaining_ = 0;
};

struct LifetimeStats {
  double mean_days = 0.0;
  std::size_t n_qualifying = 0;
  Histogram histogram;
};

/// Only hosts silent for at least this long count toward lifetime statistics.
inline constexpr std::int64_t kCensorWindowS = 30 * 86400;

/// Throws Error("all hosts censored") when no host qualifies.
LifetimeStats lifetime_stats(std::span<const HostRecord> records, std::int64_t now_utc,
                             std::span<const double> bin_edges_days = {});

inline double expected_active_hosts(double arrival_rate_per_day, double mean_lifetime_days) {
  return arrival_rate_per_day * mean_lifetime_days;
}

/// Host arrivals (piecewise-constant Poisson rate) and lifetimes.
struct ChurnModel {
  struct Segment {
    double start_day = 0.0;
    double rate_per_day = 0.0;
  };
  enum class LifetimeKind { Exponential, Constant, Empirical };

  std::vector<Segment> arrivals{{0.0, 0.0}};
  LifetimeKind lifetime_kind = LifetimeKind::Exponential;
  double lifetime_mean_days = 91.0;  // Exponential and Constant
  std::optional<EmpiricalDistribution> lifetime_empirical;

  void validate() const;
  double rate_at(double day) const;
  /// Time-averaged arrival rate over [0, duration).
  double mean_rate(double duration_days) const;
  double mean_lifetime() const;
  double sample_lifetime(Rng& rng) const;
  /// Remaining lifetime of a host alive in steady state (equilibrium residual).
  double sample_residual_lifetime(Rng& rng) const;
  /// Next arrival strictly after `day`, or +inf if the rate stays zero.
  double next_arrival(double day, Rng& rng) const;
};

}  // namespace volpool
