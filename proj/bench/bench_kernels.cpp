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


#include <benchmark/benchmark.h>

#include <vector>

#include "volpool/capacity.hpp"
#include "volpool/ingest.hpp"
#include "volpool/population.hpp"
#include "volpool/reference.hpp"

namespace {

using namespace volpool;

const std::vector<HostRecord>& pool() {
  static const auto p = generate_pool(PoolSpec::measured_defaults(200000, 42));
  return p;
}

std::vector<double> grid() {
  std::vector<double> g;
  for (int i = 0; i <= 64; ++i) g.push_back(i * 25.0);
  return g;
}

void BM_HardwareFlopsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::hardware_flops(pool()));
}
void BM_HardwareFlopsParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hardware_flops(pool()));
}

void BM_RateCurveSerial(benchmark::State& state) {
  const auto g = grid();
  const auto f = CapacityFactors::measured_defaults();
  for (auto _ : state) benchmark::DoNotOptimize(reference::compute_vs_rate_curve(pool(), g, f));
}
void BM_RateCurveParallel(benchmark::State& state) {
  const auto g = grid();
  const auto f = CapacityFactors::measured_defaults();
  for (auto _ : state) benchmark::DoNotOptimize(compute_vs_rate_curve(pool(), g, f));
}

void BM_ConditionalAggregateSerial(benchmark::State& state) {
  const std::vector<double> t = {0, 50, 100, 200, 400, 800, 1600};
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::conditional_aggregate(pool(), HostField::HostFlops, HostField::Throughput, t));
}
void BM_ConditionalAggregateParallel(benchmark::State& state) {
  const std::vector<double> t = {0, 50, 100, 200, 400, 800, 1600};
  for (auto _ : state)
    benchmark::DoNotOptimize(conditional_aggregate(pool(), HostField::HostFlops, HostField::Throughput, t));
}

std::vector<double> throughput_values() {
  std::vector<double> v;
  for (const auto& h : pool()) v.push_back(h.throughput_down_kbps);
  return v;
}

void BM_HistogramSerial(benchmark::State& state) {
  const auto v = throughput_values();
  std::vector<double> edges;
  for (int i = 0; i <= 40; ++i) edges.push_back(i * 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(reference::make_histogram(v, edges));
}
void BM_HistogramParallel(benchmark::State& state) {
  const auto v = throughput_values();
  std::vector<double> edges;
  for (int i = 0; i <= 40; ++i) edges.push_back(i * 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(make_histogram(v, edges));
}

void BM_BreakdownSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::breakdown(pool(), BreakdownKey::Country));
}
void BM_BreakdownParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(breakdown(pool(), BreakdownKey::Country));
}

BENCHMARK(BM_HardwareFlopsSerial);
BENCHMARK(BM_HardwareFlopsParallel);
BENCHMARK(BM_RateCurveSerial);
BENCHMARK(BM_RateCurveParallel);
BENCHMARK(BM_ConditionalAggregateSerial);
BENCHMARK(BM_ConditionalAggregateParallel);
BENCHMARK(BM_HistogramSerial);
BENCHMARK(BM_HistogramParallel);
BENCHMARK(BM_BreakdownSerial);
BENCHMARK(BM_BreakdownParallel);

}  // namespace

int main(int argc, char** argv) {
  pool();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
