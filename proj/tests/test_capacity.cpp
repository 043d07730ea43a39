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

#include <omp.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "volpool/capacity.hpp"
#include "volpool/error.hpp"
#include "volpool/histogram.hpp"
#include "volpool/population.hpp"
#include "volpool/reference.hpp"

using namespace volpool;

namespace {

std::vector<HostRecord> random_pool(std::size_t n, std::uint64_t seed) {
  return generate_pool(PoolSpec::measured_defaults(n, seed));
}

}  // namespace

TEST_CASE("utilization and potential with the published factors") {
  const auto f = CapacityFactors::measured_defaults();
  const double u = 0.899 * 0.81 * 0.84 / 2.0 * 0.917;
  CHECK(utilization_product(f) == doctest::Approx(u).epsilon(1e-12));
  CHECK(utilization_product(f) == doctest::Approx(0.2805).epsilon(0.0005 / 0.2805));
  CHECK(f.hardware_product() == doctest::Approx(535169.0).epsilon(1e-9));
  CHECK(potential_flops(f) / 1e3 == doctest::Approx(149.8).epsilon(0.005));
}

TEST_CASE("capacity factor properties") {
  CapacityFactors ones;
  ones.arrival_rate = 10;
  ones.mean_lifetime = 5;
  ones.mean_flops_per_cpu = 2;
  CHECK(potential_flops(ones) == ones.hardware_product());

  auto f = CapacityFactors::measured_defaults();
  auto g = f;
  g.redundancy = 1.0;
  CHECK(potential_flops(f) == doctest::Approx(potential_flops(g) / 2.0));

  f.redundancy = 0.5;
  CHECK_THROWS_AS(f.validate(), Error);
  f = CapacityFactors::measured_defaults();
  f.on_fraction = 1.5;
  CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("critical data rate") {
  auto h = test::make_host();
  h.flops_per_cpu = 1.0;
  h.throughput_down_kbps = 1000.0;
  CHECK(critical_data_rate(h) == 450.0);
  h.throughput_down_kbps = 289.0;
  h.flops_per_cpu = 1.613;
  CHECK(critical_data_rate(h) == doctest::Approx(450.0 * 0.289 / 1.613));
  CHECK(available_flops_at_rate(h, 0.0) == h.flops_per_cpu);
  const double r = critical_data_rate(h);
  CHECK(available_flops_at_rate(h, r) == doctest::Approx(h.flops_per_cpu));
  CHECK(available_flops_at_rate(h, 2 * r) == doctest::Approx(h.flops_per_cpu / 2));
  CHECK_THROWS_AS(available_flops_at_rate(h, -1.0), Error);
  h.flops_per_cpu = 0.0;
  CHECK_THROWS_AS(critical_data_rate(h), Error);
}

TEST_CASE("rate curve against a direct per-host oracle") {
  const auto pool = random_pool(3000, 2);
  const auto f = CapacityFactors::measured_defaults();
  const std::vector<double> grid = {0, 10, 100, 450, 1000};
  const auto curve = compute_vs_rate_curve(pool, grid, f);
  REQUIRE(curve.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double flops = 0.0;
    std::size_t unsat = 0;
    for (const auto& h : pool) {
      const double s = h.n_cpus * h.flops_per_cpu;
      const double bw_mbps = h.throughput_down_kbps / 1000.0;
      flops += grid[k] == 0.0 ? s : std::min(s, 450.0 * bw_mbps / grid[k]);
      unsat += grid[k] * s <= 450.0 * bw_mbps;
    }
    CHECK(curve[k].total_flops == doctest::Approx(flops * utilization_product(f)).epsilon(1e-9));
    CHECK(curve[k].unsaturated_fraction == doctest::Approx(static_cast<double>(unsat) / pool.size()));
  }
  CHECK(curve[0].total_flops == doctest::Approx(hardware_flops(pool) * utilization_product(f)));
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].total_flops <= curve[k - 1].total_flops);
    CHECK(curve[k].unsaturated_fraction <= curve[k - 1].unsaturated_fraction);
  }
  const std::vector<double> bad = {5, 1};
  CHECK_THROWS_AS(compute_vs_rate_curve(pool, bad, f), Error);

  const auto per_host = compute_vs_rate_curve(pool, grid, f, CurveMode::PerHost);
  double oracle = 0.0;
  for (const auto& h : pool)
    oracle += h.n_cpus * h.flops_per_cpu * h.cpu_efficiency * h.on_fraction * h.active_fraction * h.resource_share / 2.0;
  CHECK(per_host[0].total_flops == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("conditional aggregate and storage") {
  std::vector<HostRecord> pool;
  for (int i = 0; i < 5; ++i) {
    auto h = test::make_host("h" + std::to_string(i));
    h.throughput_down_kbps = 100.0 * (i + 1);
    h.disk_free_gb = 10.0 * (i + 1);
    pool.push_back(h);
  }
  const std::vector<double> t = {0, 200, 500, 600};
  const auto agg = conditional_aggregate(pool, HostField::DiskFree, HostField::Throughput, t);
  CHECK(agg[0].total == 150.0);
  CHECK(agg[1].total == 140.0);
  CHECK(agg[2].total == 50.0);
  CHECK(agg[3].total == 0.0);

  const auto f = CapacityFactors::measured_defaults();
  CHECK(storage_potential(pool, f, {}) == 150.0);
  const std::vector<std::string> names = {"on_fraction", "1/redundancy"};
  const auto sel = parse_factor_selection(names);
  CHECK(storage_potential(pool, f, sel) == doctest::Approx(150.0 * 0.81 / 2.0));
  const std::vector<std::string> bogus = {"nope"};
  CHECK_THROWS_AS(parse_factor_selection(bogus), Error);
}

TEST_CASE("access rate") {
  std::vector<HostRecord> pool(2, test::make_host());
  const auto f = CapacityFactors::measured_defaults();
  // 1000 Kbps is 125,000 B/s per host.
  CHECK(access_rate(pool, f, AccessSource::from_network()) == doctest::Approx(2 * 125000.0 * 0.83 * 0.81));
  CHECK(access_rate(pool, f, AccessSource::from_disk_rate(10.0)) == doctest::Approx(2 * 10e6 * 0.81 * 0.84));
  CHECK_THROWS_AS(access_rate(pool, f, AccessSource::from_disk_rate(-1.0)), Error);

  // The full-scale network figure: 331,785 hosts at 289 Kbps.
  std::vector<HostRecord> one(1, test::make_host());
  one[0].throughput_down_kbps = 289.0 * 331785.0;
  CHECK(access_rate(one, f, AccessSource::from_network()) == doctest::Approx(8.06e9).epsilon(0.005));
}

TEST_CASE("histogram conventions") {
  const std::vector<double> edges = {0, 1, 2};
  const std::vector<double> v = {0.0, 0.5, 1.0, 2.0, -1.0, std::nan(""), 1.999};
  const auto h = make_histogram(v, edges, "x");
  CHECK(h.counts == std::vector<std::size_t>{2, 2});
  CHECK(h.overflow == 2);
  CHECK(h.non_finite == 1);
  CHECK(h.total() == v.size());
  const std::vector<double> unsorted = {0, 2, 1};
  CHECK_THROWS_AS(make_histogram(v, unsorted), Error);
  const std::vector<double> single = {0};
  CHECK_THROWS_AS(make_histogram(v, single), Error);

  std::vector<double> shuffled = v;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto h2 = make_histogram(shuffled, edges, "x");
  CHECK(h2.counts == h.counts);
  CHECK(h2.overflow == h.overflow);
}

TEST_CASE("parallel kernels match the serial reference for any thread count") {
  const auto pool = random_pool(20000, 13);
  const auto f = CapacityFactors::measured_defaults();
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 50.0);
  const std::vector<double> thresholds = {0, 100, 300, 1000};
  std::vector<double> values;
  for (const auto& h : pool) values.push_back(h.throughput_down_kbps);
  std::vector<double> edges;
  for (int i = 0; i <= 40; ++i) edges.push_back(i * 50.0);

  const int saved = omp_get_max_threads();
  std::vector<double> first;
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    const double hw = hardware_flops(pool);
    CHECK(hw == doctest::Approx(reference::hardware_flops(pool)).epsilon(1e-12));
    const auto c = compute_vs_rate_curve(pool, grid, f);
    const auto rc = reference::compute_vs_rate_curve(pool, grid, f);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(c[k].total_flops == doctest::Approx(rc[k].total_flops).epsilon(1e-12));
      CHECK(c[k].unsaturated_fraction == rc[k].unsaturated_fraction);
    }
    const auto a = conditional_aggregate(pool, HostField::HostFlops, HostField::Throughput, thresholds);
    const auto ra = reference::conditional_aggregate(pool, HostField::HostFlops, HostField::Throughput, thresholds);
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      CHECK(a[k].total == doctest::Approx(ra[k].total).epsilon(1e-12));
    const auto h = make_histogram(values, edges);
    const auto rh = reference::make_histogram(values, edges);
    CHECK(h.counts == rh.counts);
    CHECK(h.overflow == rh.overflow);
    CHECK(storage_potential(pool, f, {}) ==
          doctest::Approx(reference::storage_potential(pool, f, {})).epsilon(1e-12));
    CHECK(access_rate(pool, f, AccessSource::from_network()) ==
          doctest::Approx(reference::access_rate(pool, f, AccessSource::from_network())).epsilon(1e-12));

    std::vector<double> snapshot = {hw, c.back().total_flops, a[1].total};
    if (first.empty())
      first = snapshot;
    else
      CHECK(snapshot == first);
  }
  omp_set_num_threads(saved);
}
