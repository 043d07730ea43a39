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

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "volpool/capacity.hpp"
#include "volpool/population.hpp"

namespace volpool {

/// One application workload. Every work unit in a run uses the same spec.
struct TaskSpec {
  double flops_per_task = 3.6e12;
  double input_size_mb = 1.0;
  double output_size_mb = 0.0;
  double deadline_days = 7.0;
  double memory_footprint_mb = 32.0;

  void validate() const;
  /// MB of input per reference quantum of FLOP.
  double data_rate() const;
};

enum class ResultOutcome { Correct, Erroneous, TimedOut, Lost };
enum class WorkUnitState { Unsent, InProgress, Validated, Invalid };

std::string_view to_string(ResultOutcome o);
std::string_view to_string(WorkUnitState s);

struct ResultRecord {
  std::uint64_t host_id = 0;
  std::uint64_t user_id = 0;
  ResultOutcome outcome = ResultOutcome::Correct;
  double finish_time = 0.0;  // simulated days
};

struct WorkUnit {
  std::uint64_t id = 0;
  int replicas_issued = 0;
  std::vector<ResultRecord> results;
  WorkUnitState state = WorkUnitState::Unsent;
};

struct QuorumDecision {
  enum class Kind { Validated, NeedMore, Invalid };
  Kind kind = Kind::NeedMore;
  int more = 0;  // replicas to issue when kind == NeedMore

  friend bool operator==(const QuorumDecision&, const QuorumDecision&) = default;
};

/// Decides a work unit once every issued replica has come back. Correct results
/// always agree with each other; Erroneous, TimedOut and Lost never match.
/// results.size() is taken as the number of replicas issued so far.
QuorumDecision validate_quorum(std::span<const ResultRecord> results, int min_quorum, int max_replicas);

/// Inputs the work-fetch policy sees when a host may request work.
struct FetchContext {
  double buffered_days = 0.0;      // wall-clock estimate of queued work
  double task_days = 0.0;          // wall-clock estimate of one new task
  double min_connection_interval_days = 0.0;
  double work_buffer_days = 0.0;
};

class WorkFetchPolicy {
 public:
  virtual ~WorkFetchPolicy() = default;
  /// Number of tasks to request; 0 means no fetch.
  virtual int tasks_to_request(const FetchContext& ctx) const = 0;
};

/// Requests enough work to stay busy until the next permitted connection plus
/// a safety buffer.
class CoverIntervalPolicy final : public WorkFetchPolicy {
 public:
  int tasks_to_request(const FetchContext& ctx) const override;
};

struct SimConfig {
  double duration_days = 100.0;
  std::uint64_t seed = 1;
  ChurnModel churn;
  PoolSpec pool;  // host attributes for the initial population and every arrival
  /// Overrides the steady-state initial population (Poisson with mean rate * lifetime).
  std::optional<std::size_t> initial_hosts;
  TaskSpec task;
  int min_quorum = 2;
  int max_replicas = 6;
  double error_rate = 0.0;
  std::optional<double> server_egress_cap_mbps;
  bool competing_share = true;

  double mean_on_dwell_hours = 12.0;
  double mean_connected_dwell_hours = 12.0;
  double mean_active_dwell_hours = 12.0;
  /// Mean extra latency before an RPC on hosts that confirm connections; 0 disables it.
  double confirm_delay_hours = 0.0;
  double work_buffer_days = 0.5;
  double sample_interval_days = 0.25;
  /// 0 means an unbounded supply of work units.
  std::uint64_t max_work_units = 0;
  std::shared_ptr<const WorkFetchPolicy> fetch_policy;

  void validate() const;
  /// Factors of the analytic model implied by this configuration.
  CapacityFactors analytic_factors() const;
};

struct TimelineSample {
  double time_days = 0.0;
  std::size_t active_hosts = 0;
  std::uint64_t validated_units = 0;
  double achieved_flops = 0.0;  // GFLOPS, cumulative average so far
  double raw_flops = 0.0;       // GFLOPS, completed plus abandoned partial work
  double bytes_downloaded_mb = 0.0;
};

struct SimReport {
  double duration_days = 0.0;
  double mean_lifetime_days = 0.0;
  int min_quorum = 0;

  double achieved_flops = 0.0;  // GFLOPS of validated work
  double raw_flops = 0.0;       // GFLOPS of every executed replica, partial work pro-rated
  double bytes_downloaded_mb = 0.0;
  double mean_active_hosts = 0.0;
  /// Executed results (Correct or Erroneous) per validated work unit.
  double replicas_per_validated_task = 0.0;

  std::uint64_t validated_units = 0;
  std::uint64_t invalid_units = 0;
  std::uint64_t replicas_sent = 0;
  std::uint64_t replicas_downloaded = 0;
  std::uint64_t results_correct = 0;
  std::uint64_t results_erroneous = 0;
  std::uint64_t results_timed_out = 0;
  std::uint64_t results_lost = 0;
  std::uint64_t work_fetches = 0;
  std::uint64_t host_arrivals = 0;
  std::uint64_t host_departures = 0;
  std::uint64_t initial_hosts = 0;
  /// Smallest gap between consecutive fetches of one host; nullopt if none.
  std::optional<double> min_fetch_spacing_days;
  /// Smallest (gap - min_connection_interval) over those fetch pairs.
  std::optional<double> min_fetch_slack_days;
  double observed_on_fraction = 0.0;
  double observed_connected_fraction = 0.0;
  double observed_active_fraction = 0.0;

  std::vector<TimelineSample> timeline;
};

SimReport run_simulation(const SimConfig& config);

struct AnalyticComparison {
  double predicted = 0.0;  // GFLOPS
  double achieved = 0.0;   // GFLOPS
  double relative_error = 0.0;
};

/// Steady-state runs only: requires duration >= 20 mean lifetimes.
AnalyticComparison analytic_comparison(const SimReport& report, const CapacityFactors& f);

inline constexpr double kSteadyStateLifetimes = 20.0;

}  // namespace volpool
