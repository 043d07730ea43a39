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


#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "volpool/error.hpp"
#include "volpool/ingest.hpp"
#include "volpool/population.hpp"

using namespace volpool;

namespace {

double mean_of(const std::vector<HostRecord>& pool, HostField f) {
  double acc = 0.0;
  for (const auto& h : pool) acc += field_value(h, f);
  return acc / static_cast<double>(pool.size());
}

double sample_mean(const FieldGenerator& g, int n, std::uint64_t seed) {
  Rng rng(seed);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += g.sample(rng);
  return acc / n;
}

}  // namespace

TEST_CASE("empirical distribution") {
  EmpiricalDistribution d({3.0, 1.0, 2.0, 4.0}, "x");
  CHECK(d.size() == 4);
  CHECK(d.mean() == 2.5);
  CHECK(d.sorted_samples()[0] == 1.0);
  CHECK(d.quantile(0.0) == 1.0);
  CHECK(d.quantile(0.99) == 4.0);
  CHECK(d.quantile(0.3) == 2.0);
  CHECK(d.quantile(0.0, true) == 1.0);
  CHECK(d.quantile(0.5, true) == doctest::Approx(2.5));
  CHECK_THROWS_AS(EmpiricalDistribution({}, "x"), Error);

  SUBCASE("single sample is degenerate") {
    EmpiricalDistribution one({7.0}, "y");
    Rng rng(1);
    for (int i = 0; i < 10; ++i) CHECK(one.sample(rng) == 7.0);
  }
  SUBCASE("fit from records") {
    std::vector<HostRecord> none;
    CHECK_THROWS_WITH_AS(fit_empirical(none, HostField::Ram), "no data", Error);
  }
}

TEST_CASE("field generators: sample means match analytic means") {
  using G = FieldGenerator;
  const std::vector<G> gens = {G::constant(2.0),
                               G::uniform(1.0, 3.0),
                               G::exponential(4.0),
                               G::lognormal(289.0, 1.5),
                               G::beta(0.81, 4.0),
                               G::discrete({1, 2, 4}, {0.75, 0.23, 0.02}),
                               G::empirical(EmpiricalDistribution({1, 2, 3, 10}, "e")),
                               G::empirical(EmpiricalDistribution({1, 2, 3, 10}, "e"), true),
                               G::mixture({G::constant(1.0), G::beta(0.5, 2.0)}, {0.832, 0.168})};
  std::uint64_t seed = 11;
  for (const auto& g : gens) {
    const double m = sample_mean(g, 200000, seed++);
    CHECK(m == doctest::Approx(g.mean()).epsilon(0.02));
  }
  CHECK(G::discrete({1, 2, 4}, {0.75, 0.23, 0.02}).mean() == doctest::Approx(1.29));
  CHECK_THROWS_AS(G::lognormal(-1.0, 0.5), Error);
  CHECK_THROWS_AS(G::beta(1.5, 2.0), Error);
}

TEST_CASE("user buckets") {
  CHECK(user_bucket_of(1) == 0);
  CHECK(user_bucket_of(2) == 1);
  CHECK(user_bucket_of(10) == 1);
  CHECK(user_bucket_of(11) == 2);
  CHECK(user_bucket_of(1000) == 3);
  CHECK(user_bucket_of(2987) == 4);
  CHECK(user_bucket_label(4) == "1000+");
}

TEST_CASE("pool generation is deterministic and index-addressable") {
  auto spec = PoolSpec::measured_defaults(2000, 5);
  const auto a = generate_pool(spec);
  const auto b = generate_pool(spec);
  CHECK(a == b);
  PoolGenerator gen(spec);
  auto h = gen.host(17);
  CHECK(h.host_id == a[17].host_id);
  CHECK(h.flops_per_cpu == a[17].flops_per_cpu);
  for (const auto& r : a) CHECK(r.check().empty());

  spec.seed = 6;
  const auto c = generate_pool(spec);
  CHECK_FALSE(a == c);
}

TEST_CASE("measured preset reproduces the published averages") {
  const auto pool = generate_pool(PoolSpec::measured_defaults(100000, 1));
  CHECK(mean_of(pool, HostField::HostFlops) == doctest::Approx(1.613).epsilon(0.02));
  CHECK(mean_of(pool, HostField::Throughput) == doctest::Approx(289.0).epsilon(0.04));
  CHECK(mean_of(pool, HostField::DiskFree) == doctest::Approx(12.00e6 / 331785.0).epsilon(0.02));
  CHECK(mean_of(pool, HostField::OnFraction) == doctest::Approx(0.81).epsilon(0.01));
  CHECK(mean_of(pool, HostField::ConnectedFraction) == doctest::Approx(0.83).epsilon(0.01));
  CHECK(mean_of(pool, HostField::ActiveFraction) == doctest::Approx(0.84).epsilon(0.01));
  CHECK(mean_of(pool, HostField::CpuEfficiency) == doctest::Approx(0.899).epsilon(0.01));
  CHECK(mean_of(pool, HostField::ResourceShare) == doctest::Approx(0.917).epsilon(0.01));

  std::size_t multi = 0, run_if_active = 0;
  for (const auto& h : pool) {
    multi += h.n_cpus >= 2;
    run_if_active += h.preferences.run_if_active;
  }
  CHECK(static_cast<double>(multi) / pool.size() == doctest::Approx(0.25).epsilon(0.03));
  CHECK(static_cast<double>(run_if_active) / pool.size() == doctest::Approx(0.719).epsilon(0.02));

  const auto rows = breakdown(pool, BreakdownKey::CpuVendor);
  for (const auto& r : rows) {
    if (r.key == "Intel") CHECK(r.mean_flops == doctest::Approx(1.600).epsilon(0.02));
    if (r.key == "AMD") CHECK(r.mean_flops == doctest::Approx(1.737).epsilon(0.02));
  }
}

TEST_CASE("user assignment matches bucket shares") {
  auto spec = PoolSpec::measured_defaults(150000, 3);
  const auto pool = generate_pool(spec);
  const auto rows = hosts_per_user(pool);
  const double expected[] = {41.4, 44.2, 11.1, 1.7, 1.4};
  std::size_t hosts = 0;
  for (std::size_t b = 0; b < kUserBuckets; ++b) {
    CHECK(std::abs(rows[b].pct_hosts - expected[b]) < 1.0);
    hosts += rows[b].n_hosts;
  }
  CHECK(hosts == pool.size());

  std::vector<HostRecord> empty;
  CHECK_THROWS_AS(assign_users(empty, spec.hosts_per_user_weights, 1), Error);
  auto copy = pool;
  CHECK_THROWS_AS(assign_users(copy, {0, 0, 0, 0, 0}, 1), Error);
}

TEST_CASE("user stream groups consecutive hosts") {
  UserStream singles({1, 0, 0, 0, 0}, 1);
  std::set<std::uint64_t> ids;
  for (int i = 0; i < 100; ++i) ids.insert(singles.next());
  CHECK(ids.size() == 100);

  UserStream mixed({137601, 146788, 36828, 5799, 4770}, 2);
  std::map<std::uint64_t, std::size_t> per_user;
  for (int i = 0; i < 200000; ++i) ++per_user[mixed.next()];
  std::array<double, kUserBuckets> hosts{};
  for (const auto& [u, n] : per_user) hosts[user_bucket_of(n)] += n;
  // Shares are approximate since the last user may be cut short.
  CHECK(hosts[0] / 200000.0 == doctest::Approx(0.414).epsilon(0.1));
  CHECK(hosts[1] / 200000.0 == doctest::Approx(0.442).epsilon(0.1));
}

TEST_CASE("rank coupling preserves marginals and induces correlation") {
  auto spec = PoolSpec::measured_defaults(5000, 9);
  const auto plain = generate_pool(spec);
  spec.couplings.push_back({HostField::FlopsPerCpu, HostField::Throughput, 0.9});
  const auto coupled = generate_pool(spec);

  auto sorted = [](const std::vector<HostRecord>& p) {
    std::vector<double> v;
    for (const auto& h : p) v.push_back(h.throughput_down_kbps);
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted(plain) == sorted(coupled));

  auto rank_corr = [](const std::vector<HostRecord>& p) {
    const std::size_t n = p.size();
    auto ranks = [&](HostField f) {
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return field_value(p[a], f) < field_value(p[b], f); });
      std::vector<double> r(n);
      for (std::size_t k = 0; k < n; ++k) r[idx[k]] = static_cast<double>(k);
      return r;
    };
    const auto ra = ranks(HostField::FlopsPerCpu), rb = ranks(HostField::Throughput);
    const double m = (n - 1) / 2.0;
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
      num += (ra[i] - m) * (rb[i] - m);
      da += (ra[i] - m) * (ra[i] - m);
      db += (rb[i] - m) * (rb[i] - m);
    }
    return num / std::sqrt(da * db);
  };
  CHECK(std::abs(rank_corr(plain)) < 0.05);
  CHECK(rank_corr(coupled) > 0.5);
}

TEST_CASE("lifetime statistics skip recently seen hosts") {
  std::vector<HostRecord> hosts(3);
  const std::int64_t now = 1139529600;
  hosts[0].created_utc = now - 100 * 86400;
  hosts[0].last_contact_utc = now - 40 * 86400;  // 60 days
  hosts[1].created_utc = now - 200 * 86400;
  hosts[1].last_contact_utc = now - 180 * 86400;  // 20 days
  hosts[2].created_utc = now - 50 * 86400;
  hosts[2].last_contact_utc = now - 86400;  // still active, censored
  const auto s = lifetime_stats(hosts, now);
  CHECK(s.n_qualifying == 2);
  CHECK(s.mean_days == doctest::Approx(40.0));
  CHECK(s.histogram.counts[0] == 1);
  CHECK(s.histogram.counts[2] == 1);

  std::vector<HostRecord> fresh(1);
  fresh[0].created_utc = now - 10;
  fresh[0].last_contact_utc = now;
  CHECK_THROWS_WITH_AS(lifetime_stats(fresh, now), "all hosts censored", Error);
}

TEST_CASE("churn model") {
  ChurnModel c;
  c.arrivals = {{0.0, 10.0}, {50.0, 0.0}, {100.0, 20.0}};
  c.lifetime_mean_days = 30.0;
  CHECK_NOTHROW(c.validate());
  CHECK(c.rate_at(10.0) == 10.0);
  CHECK(c.rate_at(60.0) == 0.0);
  CHECK(c.rate_at(150.0) == 20.0);
  CHECK(c.mean_rate(200.0) == doctest::Approx((500.0 + 2000.0) / 200.0));

  Rng rng(4);
  double t = 0.0;
  std::size_t in_gap = 0, total = 0;
  while ((t = c.next_arrival(t, rng)) < 200.0) {
    ++total;
    in_gap += t >= 50.0 && t < 100.0;
  }
  CHECK(in_gap == 0);
  CHECK(static_cast<double>(total) == doctest::Approx(2500.0).epsilon(0.1));

  ChurnModel idle;
  idle.arrivals = {{0.0, 0.0}};
  CHECK(std::isinf(idle.next_arrival(0.0, rng)));

  ChurnModel bad;
  bad.arrivals = {{1.0, 5.0}};
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(expected_active_hosts(20.0, 30.0) == 600.0);
}

TEST_CASE("residual lifetimes follow the equilibrium law") {
  ChurnModel c;
  c.lifetime_kind = ChurnModel::LifetimeKind::Empirical;
  c.lifetime_empirical = EmpiricalDistribution({10.0, 30.0}, "lifetime");
  Rng rng(8);
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += c.sample_residual_lifetime(rng);
  // E[L^2] / (2 E[L]) = (100 + 900) / 2 / 40.
  CHECK(acc / n == doctest::Approx(12.5).epsilon(0.02));
}
