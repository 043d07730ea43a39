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


// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "volpool/capacity.hpp"
#include "volpool/cli.hpp"
#include "volpool/ingest.hpp"
#include "volpool/population.hpp"
#include "volpool/random.hpp"
#include "volpool/sim.hpp"

using namespace volpool;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

CapacityFactors published_factors() {
  CapacityFactors f;
  f.arrival_rate = 331785.0 / 91.0;
  f.mean_lifetime = 91.0;
  f.mean_ncpus = 1.0;
  f.mean_flops_per_cpu = 535169.0 / 331785.0;
  f.cpu_efficiency = 0.899;
  f.on_fraction = 0.81;
  f.active_fraction = 0.84;
  f.redundancy = 2.0;
  f.resource_share = 0.917;
  f.connected_fraction = 0.83;
  return f;
}

Outcome utilization() {
  const double u = utilization_product(published_factors());
  return {std::abs(u - 0.2805) <= 0.0005, fmt("utilization %.6f, target 0.2805 +/- 0.0005", u)};
}

Outcome headline() {
  const auto f = published_factors();
  const double hw = f.hardware_product();
  const double tflops = potential_flops(f) / 1e3;
  const double rel = std::abs(tflops - 149.8) / 149.8;
  return {std::abs(hw - 535169.0) < 1e-6 && rel <= 0.005,
          fmt("hardware %.1f GFLOPS, potential %.2f TFLOPS (%.3f%% from 149.8)", hw, tflops, rel * 100)};
}

Outcome critical_rate() {
  // 1 Mbps = 1e6 bit/s; one hour moves 3.6e9 bits = 4.5e8 bytes = 450 MB.
  const double bits_per_hour = 1e6 * 3600.0;
  const double mb_per_hour = bits_per_hour / 8.0 / 1e6;
  HostRecord h;
  h.n_cpus = 1;
  h.flops_per_cpu = 1.0;
  h.throughput_down_kbps = 1000.0;
  const double r = critical_data_rate(h);
  return {r == 450.0 && mb_per_hour == 450.0 && r == mb_per_hour,
          fmt("critical rate %.17g MB per reference quantum, derived %.17g", r, mb_per_hour)};
}

Outcome rate_curve_shape() {
  const auto pool = generate_pool(PoolSpec::measured_defaults(50000, 2006));
  double flops = 0, thr = 0;
  for (const auto& h : pool) {
    flops += whole_host_flops(h);
    thr += h.throughput_down_kbps;
  }
  flops /= pool.size();
  thr /= pool.size();
  const bool marginals = std::abs(flops - 1.613) / 1.613 < 0.03 && std::abs(thr - 289.0) / 289.0 < 0.05;

  const auto f = CapacityFactors::measured_defaults();
  const std::vector<double> grid = {0, 1, 2, 5, 10, 20, 50, 100, 200, 450, 1000, 2000, 5000};
  const auto curve = compute_vs_rate_curve(pool, grid, f);
  bool monotone = true;
  for (std::size_t k = 1; k < curve.size(); ++k)
    monotone = monotone && curve[k].total_flops <= curve[k - 1].total_flops &&
               curve[k].unsaturated_fraction <= curve[k - 1].unsaturated_fraction;
  const double potential = hardware_flops(pool) * utilization_product(f);
  const bool at_zero = std::abs(curve[0].total_flops - potential) <= 1e-9 * potential;
  const double at_100 = curve[7].total_flops / potential;
  return {marginals && monotone && at_zero && at_100 > 0.10,
          fmt("mean flops %.4f, mean throughput %.1f Kbps, R=100 keeps %.1f%% of potential", flops, thr,
              at_100 * 100) +
              (monotone ? ", non-increasing" : ", NOT monotone") + (at_zero ? ", R=0 equals potential" : "")};
}

PoolSpec homogeneous_pool() {
  PoolSpec p;
  using G = FieldGenerator;
  p.fields[HostField::NCpus] = G::constant(1);
  p.fields[HostField::FlopsPerCpu] = G::constant(1.0);
  p.fields[HostField::CpuEfficiency] = G::constant(0.9);
  p.fields[HostField::OnFraction] = G::constant(0.8);
  p.fields[HostField::ConnectedFraction] = G::constant(0.85);
  p.fields[HostField::ActiveFraction] = G::constant(0.85);
  p.fields[HostField::ResourceShare] = G::constant(1.0);
  p.fields[HostField::Throughput] = G::constant(1000.0);
  return p;
}

SimConfig churn_config(double rate, double lifetime, double duration, std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.duration_days = duration;
  c.churn.arrivals = {{0.0, rate}};
  c.churn.lifetime_mean_days = lifetime;
  c.pool = homogeneous_pool();
  c.task.flops_per_task = 1.44e13;
  c.task.input_size_mb = 0.01;
  c.task.deadline_days = 30.0;
  return c;
}

Outcome littles_law() {
  const auto r = run_simulation(churn_config(20.0, 30.0, 600.0, 5));
  const double rel = std::abs(r.mean_active_hosts - 600.0) / 600.0;
  return {rel < 0.05, fmt("time-averaged active hosts %.1f vs 600 (%.2f%%)", r.mean_active_hosts, rel * 100)};
}

// Independent Monte-Carlo of the quorum rules: issue q replicas, each wrong with
// probability e; reissue while fewer than q agree and the replica cap allows.
double quorum_oracle(double e, int q, int max_replicas, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution wrong(e);
  std::uint64_t executed = 0, validated = 0;
  for (int u = 0; u < 2000000; ++u) {
    int issued = q, correct = 0, done = 0;
    while (done < issued) {
      ++done;
      if (!wrong(rng)) ++correct;
      if (done == issued && correct < q && issued + (q - correct) <= max_replicas) issued += q - correct;
    }
    if (correct >= q) {
      ++validated;
      executed += static_cast<std::uint64_t>(done);
    }
  }
  return static_cast<double>(executed) / static_cast<double>(validated);
}

Outcome redundancy() {
  auto c = churn_config(20.0, 30.0, 300.0, 6);
  c.error_rate = 0.0;
  const auto clean = run_simulation(c);
  c.error_rate = 0.05;
  const auto noisy = run_simulation(c);
  const double oracle = quorum_oracle(0.05, 2, c.max_replicas, 99);
  const double x = noisy.replicas_per_validated_task;
  const bool ok = clean.replicas_per_validated_task == 2.0 && x > 2.0 && x < 2.35 && std::abs(x - oracle) < 0.02;
  return {ok, fmt("error 0: %.6f; error 0.05: %.4f vs oracle %.4f", clean.replicas_per_validated_task, x, oracle)};
}

Outcome analytic_agreement() {
  auto c = churn_config(100.0, 20.0, 400.0, 7);
  const auto r = run_simulation(c);
  const auto cmp = analytic_comparison(r, c.analytic_factors());
  return {cmp.relative_error < 0.05 && std::abs(r.mean_active_hosts - 2000.0) < 100.0,
          fmt("achieved %.2f GFLOPS vs predicted %.2f (%.2f%%)", cmp.achieved, cmp.predicted,
              cmp.relative_error * 100) +
              fmt(", %.0f hosts", r.mean_active_hosts)};
}

Outcome table_reproduction() {
  const auto pool = generate_pool(PoolSpec::measured_defaults(331785, 1));
  std::stringstream csv;
  serialize_hosts(csv, pool);
  const auto parsed = parse_hosts(csv);
  if (!parsed.rejects.empty() || parsed.records.size() != pool.size()) return {false, "ingest lost records"};
  const auto rows = breakdown(parsed.records, BreakdownKey::CpuVendor);
  const std::pair<const char*, double> table1[] = {
      {"Intel", 217278}, {"AMD", 95958}, {"PowerPC", 15827}, {"SPARC", 1035}, {"Other", 1687}};
  double worst_vendor = 0.0;
  for (const auto& [name, hosts] : table1) {
    double share = 0.0;
    for (const auto& r : rows)
      if (r.key == name) share = static_cast<double>(r.n_hosts) / static_cast<double>(parsed.records.size());
    worst_vendor = std::max(worst_vendor, std::abs(share - hosts / 331785.0));
  }
  const auto users = hosts_per_user(parsed.records);
  const double table5[] = {41.4, 44.2, 11.1, 1.7, 1.4};
  double worst_user = 0.0;
  for (std::size_t b = 0; b < kUserBuckets; ++b) worst_user = std::max(worst_user, std::abs(users[b].pct_hosts - table5[b]));
  return {worst_vendor < 0.01 && worst_user < 1.0,
          fmt("worst vendor share error %.3f%%, worst hosts-per-user error %.3f points", worst_vendor * 100,
              worst_user) +
              fmt(" (%.1f/%.1f/%.1f", users[0].pct_hosts, users[1].pct_hosts, users[2].pct_hosts) +
              fmt("/%.1f/%.1f)", users[3].pct_hosts, users[4].pct_hosts)};
}

Outcome storage() {
  auto spec = PoolSpec::measured_defaults(331785, 12);
  const auto pool = generate_pool(spec);
  const auto f = CapacityFactors::measured_defaults();
  const double pb = storage_potential(pool, f, {}) / 1e6;
  const double mean = storage_potential(pool, f, {}) / pool.size();
  // Desk-scale fixture: 10,000 generated hosts calibrated to a mean of exactly 36 GB free.
  spec.n_hosts = 10000;
  auto small = generate_pool(spec);
  double raw = 0.0;
  for (const auto& h : small) raw += h.disk_free_gb;
  const double k = 36.0 * small.size() / raw;
  for (auto& h : small) {
    h.disk_free_gb *= k;
    h.disk_total_gb = std::max(h.disk_total_gb, h.disk_free_gb);
  }
  const double small_pb = storage_potential(small, f, {}) / 1e6;
  const double scaled = small_pb * 331785.0 / 10000.0;
  // Arithmetic check: the small total equals its own mean times its host count.
  const double small_mean = storage_potential(small, f, {}) / small.size();
  const bool proportional = std::abs(small_pb - small_mean * 10000.0 / 1e6) < 1e-9 * small_pb;
  const bool desk = std::abs(small_pb - 0.36) < 1e-9 && scaled >= 11.9 && scaled <= 12.1;
  return {pb >= 11.9 && pb <= 12.1 && std::abs(mean - 36.0) < 0.5 && desk && proportional,
          fmt("331,785 hosts: mean %.2f GB, total %.3f PB; ", mean, pb) +
              fmt("10,000 hosts: %.4f PB, scaled %.3f PB", small_pb, scaled)};
}

std::string dir_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    all += p.filename().string() + "\n" + s.str();
  }
  return all;
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"volpool"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "volpool_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    auto spec = PoolSpec::measured_defaults(5000, 77);
    std::ofstream out(root / "hosts.csv");
    serialize_hosts(out, generate_pool(spec));
  }
  const Json doc = {
      {"input", (root / "hosts.csv").string()},
      {"pool", {{"n_hosts", 20000}}},
      {"capacity", {{"storage_factors", {"on_fraction", "1/redundancy"}}}},
      {"sim",
       {{"duration_days", 200},
        {"error_rate", 0.05},
        {"churn", {{"arrival_rate", 10}, {"lifetime", {{"kind", "exponential"}, {"mean_days", 10}}}}},
        {"pool", {{"n_hosts", 0}}}}}};
  std::ofstream(root / "config.json") << doc.dump(2);
  const std::string cfg = (root / "config.json").string();
  std::string detail;
  bool ok = true;
  for (const char* cmd : {"ingest", "stats", "capacity", "sweep", "simulate"}) {
    std::string digest[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = root / (std::string(cmd) + std::to_string(rep));
      const int code = cli({cmd, "--config", cfg, "--seed", "2026", "--out", out.string()});
      if (code != 0) {
        ok = false;
        detail += std::string(cmd) + " exit " + std::to_string(code) + "; ";
      }
      digest[rep] = dir_digest(out);
    }
    const bool same = !digest[0].empty() && digest[0] == digest[1];
    ok = ok && same;
    detail += std::string(cmd) + (same ? " identical; " : " DIFFERS; ");
  }
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "utilization product", 1.0, utilization},
      {2, "headline capacity", 1.0, headline},
      {3, "critical rate identity", 1.0, critical_rate},
      {4, "rate curve shape", 10.0, rate_curve_shape},
      {5, "Little's law", 30.0, littles_law},
      {6, "redundancy overhead", 30.0, redundancy},
      {7, "analytic/simulated agreement", 60.0, analytic_agreement},
      {8, "table reproduction", 10.0, table_reproduction},
      {9, "storage aggregate", 10.0, storage},
      {10, "determinism", 60.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %2d %s: %s (%.2f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
