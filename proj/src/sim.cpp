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

#include "volpool/sim.hpp"

#include <cstdio>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>

#include "volpool/error.hpp"
#include "volpool/units.hpp"

namespace volpool {

std::string_view to_string(ResultOutcome o) {
  switch (o) {
    case ResultOutcome::Correct: return "Correct";
    case ResultOutcome::Erroneous: return "Erroneous";
    case ResultOutcome::TimedOut: return "TimedOut";
    case ResultOutcome::Lost: return "Lost";
  }
  return "?";
}

std::string_view to_string(WorkUnitState s) {
  switch (s) {
    case WorkUnitState::Unsent: return "Unsent";
    case WorkUnitState::InProgress: return "InProgress";
    case WorkUnitState::Validated: return "Validated";
    case WorkUnitState::Invalid: return "Invalid";
  }
  return "?";
}

void TaskSpec::validate() const {
  require(flops_per_task > 0.0 && std::isfinite(flops_per_task), "task: flops_per_task must be > 0");
  require(input_size_mb > 0.0 && std::isfinite(input_size_mb), "task: input_size must be > 0");
  require(output_size_mb >= 0.0, "task: output_size must be >= 0");
  require(deadline_days > 0.0, "task: deadline must be > 0");
  require(memory_footprint_mb > 0.0, "task: memory_footprint must be > 0");
}

double TaskSpec::data_rate() const { return input_size_mb / (flops_per_task / units::kReferenceFlop); }

QuorumDecision validate_quorum(std::span<const ResultRecord> results, int min_quorum, int max_replicas) {
  const auto correct =
      static_cast<int>(std::count_if(results.begin(), results.end(),
                                     [](const ResultRecord& r) { return r.outcome == ResultOutcome::Correct; }));
  if (correct >= min_quorum) return {QuorumDecision::Kind::Validated, 0};
  const int need = min_quorum - correct;
  if (static_cast<int>(results.size()) + need > max_replicas) return {QuorumDecision::Kind::Invalid, 0};
  return {QuorumDecision::Kind::NeedMore, need};
}

int CoverIntervalPolicy::tasks_to_request(const FetchContext& ctx) const {
  if (!(ctx.task_days > 0.0) || !std::isfinite(ctx.task_days) || !std::isfinite(ctx.buffered_days)) return 0;
  const double target = ctx.min_connection_interval_days + ctx.work_buffer_days;
  if (ctx.buffered_days >= target) return 0;
  const double n = std::ceil((target - ctx.buffered_days) / ctx.task_days);
  return static_cast<int>(std::clamp(n, 1.0, 10000.0));
}

void SimConfig::validate() const {
  require(duration_days > 0.0 && std::isfinite(duration_days), "sim: duration must be > 0");
  require(min_quorum >= 1, "sim: min_quorum must be >= 1");
  require(max_replicas >= min_quorum, "sim: max_replicas must be >= min_quorum");
  require(error_rate >= 0.0 && error_rate < 1.0, "sim: error_rate must be in [0,1)");
  require(!server_egress_cap_mbps || *server_egress_cap_mbps > 0.0, "sim: server egress cap must be > 0");
  require(mean_on_dwell_hours > 0.0 && mean_connected_dwell_hours > 0.0 && mean_active_dwell_hours > 0.0,
          "sim: dwell times must be > 0");
  require(confirm_delay_hours >= 0.0, "sim: confirm delay must be >= 0");
  require(work_buffer_days >= 0.0, "sim: work buffer must be >= 0");
  require(sample_interval_days > 0.0, "sim: sample interval must be > 0");
  task.validate();
  churn.validate();
  pool.validate();
}

CapacityFactors SimConfig::analytic_factors() const {
  CapacityFactors f;
  f.arrival_rate = churn.mean_rate(duration_days);
  f.mean_lifetime = churn.mean_lifetime();
  f.mean_ncpus = pool.field_mean(HostField::NCpus);
  f.mean_flops_per_cpu = f.mean_ncpus > 0.0 ? pool.mean_host_flops() / f.mean_ncpus : 0.0;
  f.cpu_efficiency = pool.field_mean(HostField::CpuEfficiency);
  f.on_fraction = pool.field_mean(HostField::OnFraction);
  f.active_fraction = pool.field_mean(HostField::ActiveFraction);
  f.connected_fraction = pool.field_mean(HostField::ConnectedFraction);
  f.redundancy = min_quorum;
  f.resource_share = competing_share ? pool.field_mean(HostField::ResourceShare) : 1.0;
  return f;
}

AnalyticComparison analytic_comparison(const SimReport& report, const CapacityFactors& f) {
  require(report.duration_days >= kSteadyStateLifetimes * report.mean_lifetime_days,
          "analytic comparison needs a steady-state run (duration >= 20 mean lifetimes)");
  AnalyticComparison out;
  out.predicted = potential_flops(f);
  require(out.predicted > 0.0, "analytic comparison: predicted capacity is zero");
  out.achieved = report.achieved_flops;
  out.relative_error = std::abs(out.achieved - out.predicted) / out.predicted;
  return out;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr int kPendingScan = 64;
// Local clock is sampled just past the current instant so that boundary
// events see the interval they open.
constexpr double kHourNudge = 1e-7;

enum class EventType : std::uint8_t {
  End,
  Sample,
  Arrival,
  Departure,
  ToggleOn,
  ToggleConnected,
  ToggleActive,
  HourBoundary,
  ComputeDone,
  DownloadDone,
  FetchTimer,
  Rpc,
  Deadline,
};

struct Event {
  double t;
  std::uint64_t seq;
  EventType type;
  std::uint32_t target;
  std::uint64_t tag;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const { return a.t > b.t || (a.t == b.t && a.seq > b.seq); }
};

struct Replica {
  std::uint64_t gen = 0;
  bool live = false;
  std::uint32_t unit = kNone;
  std::uint32_t host = kNone;
  double dl_remaining = 0.0;  // MB
  double flop_remaining = 0.0;
  double flop_done = 0.0;
  bool erroneous = false;
};

struct Unit {
  bool live = false;
  int issued = 0;
  int outstanding = 0;
  int queued = 0;
  int correct = 0;
  int executed = 0;
  std::vector<std::uint64_t> users;
  std::vector<ResultRecord> results;
};

struct Host {
  HostRecord rec;
  std::uint64_t hid = 0;
  std::uint64_t uid = 0;
  SplitMix64 rng{0};
  bool alive = true;
  bool on = true;
  bool connected = true;
  bool allowed = true;
  bool has_hour_gates = false;
  double last_advance = 0.0;
  double speed = 0.0;  // FLOP/day while computing
  double bw = 0.0;     // MB/day while downloading
  double availability = 1.0;

  std::vector<std::uint32_t> queue;  // FIFO, not yet computed
  std::vector<std::uint32_t> done;   // computed, awaiting report
  std::uint32_t running = kNone;
  std::uint32_t downloading = kNone;

  double compute_rate = 0.0;
  std::uint32_t compute_slot = kNone;
  std::uint64_t compute_gen = 0;
  double dl_rate = 0.0;
  std::uint32_t dl_slot = kNone;
  std::uint64_t dl_gen = 0;
  std::uint64_t fetch_gen = 0;
  double fetch_timer_at = -1.0;

  double next_fetch_allowed = 0.0;
  std::optional<double> last_fetch;
  bool rpc_pending = false;

  double alive_time = 0.0;
  double on_time = 0.0;
  double connected_time = 0.0;
  double active_time = 0.0;
};

class Engine {
 public:
  explicit Engine(const SimConfig& cfg)
      : cfg_(cfg),
        policy_(cfg.fetch_policy ? *cfg.fetch_policy : default_policy_),
        gen_(seeded_pool(cfg)),
        users_(cfg.pool.hosts_per_user_weights, mix_seed(cfg.seed, 2)),
        churn_rng_(mix_seed(cfg.seed, 3)),
        outcome_rng_(mix_seed(cfg.seed, 4)) {
    if (cfg.server_egress_cap_mbps)
      cap_mb_per_day_ = units::kbps_to_mb_per_day(*cfg.server_egress_cap_mbps * units::kKilo);
  }

  SimReport run();

 private:
  static PoolSpec seeded_pool(const SimConfig& cfg) {
    PoolSpec spec = cfg.pool;
    spec.seed = mix_seed(cfg.seed, spec.seed);
    return spec;
  }

  void schedule(double t, EventType type, std::uint32_t target, std::uint64_t tag = 0) {
    events_.push(Event{t, seq_++, type, target, tag});
  }

  void count_alive(int delta) {
    alive_area_ += static_cast<double>(alive_) * (now_ - alive_since_);
    alive_since_ = now_;
    alive_ = static_cast<std::size_t>(static_cast<long long>(alive_) + delta);
  }

  double dwell_days(const Host& h, EventType process, bool up) const;
  void schedule_toggle(std::uint32_t idx, EventType process);
  void create_host(bool initial);
  void depart(std::uint32_t idx);

  double local_hour(const Host& h) const {
    double hour = std::fmod(now_ * units::kHoursPerDay + static_cast<double>(h.rec.tz_offset_s) / units::kSecondsPerHour +
                                kHourNudge,
                            units::kHoursPerDay);
    return hour < 0.0 ? hour + units::kHoursPerDay : hour;
  }
  HostClock clock(const Host& h) const { return HostClock{local_hour(h), false, !h.allowed}; }
  bool can_compute(const Host& h) const {
    return h.alive && h.on && compute_allowed(h.rec.preferences, clock(h));
  }
  bool can_comm(const Host& h) const {
    return h.alive && h.on && h.connected && comm_allowed(h.rec.preferences, clock(h));
  }
  void schedule_hour_boundary(std::uint32_t idx);

  void advance(Host& h);
  void reschedule(std::uint32_t idx);
  void update_downloads(std::uint32_t idx, bool want);
  void recompute_capped();

  bool estimate_fetch(const Host& h, int& n_tasks) const;
  void try_rpc(std::uint32_t idx);
  void do_rpc(std::uint32_t idx);
  void assign_work(std::uint32_t idx, int n);
  std::uint32_t take_pending(std::uint64_t uid);
  std::uint32_t new_unit();
  void send_replica(std::uint32_t unit_slot, std::uint32_t host_idx);
  void report(std::uint32_t slot, ResultOutcome outcome);
  void evaluate(std::uint32_t unit_slot);
  void free_unit(std::uint32_t unit_slot);

  void on_compute_done(std::uint32_t idx, std::uint64_t gen);
  void on_download_done(std::uint32_t idx, std::uint64_t gen);
  void on_deadline(std::uint32_t slot, std::uint64_t gen);
  void take_sample();
  static void erase_value(std::vector<std::uint32_t>& v, std::uint32_t x) {
    auto it = std::find(v.begin(), v.end(), x);
    if (it != v.end()) v.erase(it);
  }

  const SimConfig& cfg_;
  CoverIntervalPolicy default_policy_;
  const WorkFetchPolicy& policy_;
  PoolGenerator gen_;
  UserStream users_;
  Rng churn_rng_;
  Rng outcome_rng_;

  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;

  std::vector<Host> hosts_;
  std::vector<Replica> replicas_;
  std::vector<std::uint32_t> free_replicas_;
  std::vector<Unit> units_;
  std::vector<std::uint32_t> free_units_;
  std::deque<std::uint32_t> pending_;
  std::uint64_t units_created_ = 0;

  double cap_mb_per_day_ = 0.0;
  std::set<std::uint32_t> capped_;

  std::size_t alive_ = 0;
  double alive_since_ = 0.0;
  double alive_area_ = 0.0;

  std::uint64_t completed_replicas_ = 0;
  double partial_flop_ = 0.0;
  std::uint64_t executed_in_validated_ = 0;
  SimReport report_;
};

double Engine::dwell_days(const Host& h, EventType process, bool up) const {
  double fraction = 1.0, up_hours = 12.0;
  switch (process) {
    case EventType::ToggleOn:
      fraction = h.rec.on_fraction;
      up_hours = cfg_.mean_on_dwell_hours;
      break;
    case EventType::ToggleConnected:
      fraction = h.rec.connected_fraction;
      up_hours = cfg_.mean_connected_dwell_hours;
      break;
    default:
      fraction = h.rec.active_fraction;
      up_hours = cfg_.mean_active_dwell_hours;
      break;
  }
  const double up_days = up_hours / units::kHoursPerDay;
  return up ? up_days : up_days * (1.0 - fraction) / fraction;
}

void Engine::schedule_toggle(std::uint32_t idx, EventType process) {
  Host& h = hosts_[idx];
  const double fraction = process == EventType::ToggleOn          ? h.rec.on_fraction
                          : process == EventType::ToggleConnected ? h.rec.connected_fraction
                                                                  : h.rec.active_fraction;
  if (fraction <= 0.0 || fraction >= 1.0) return;
  const bool up = process == EventType::ToggleOn ? h.on : process == EventType::ToggleConnected ? h.connected : h.allowed;
  const double t = now_ + exponential(h.rng, dwell_days(h, process, up));
  if (t < cfg_.duration_days) schedule(t, process, idx);
}

void Engine::schedule_hour_boundary(std::uint32_t idx) {
  const Host& h = hosts_[idx];
  const auto& p = h.rec.preferences;
  const double hour = local_hour(h) - kHourNudge;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& range : {p.active_hours, p.comm_hours}) {
    if (!range) continue;
    for (double b : {range->start, range->end}) {
      double delta = b - hour;
      while (delta <= kHourNudge) delta += units::kHoursPerDay;
      best = std::min(best, delta);
    }
  }
  if (std::isfinite(best)) {
    const double t = now_ + best / units::kHoursPerDay;
    if (t < cfg_.duration_days) schedule(t, EventType::HourBoundary, idx);
  }
}

void Engine::create_host(bool initial) {
  const auto idx = static_cast<std::uint32_t>(hosts_.size());
  hosts_.emplace_back();
  Host& h = hosts_.back();
  h.rec = gen_.host(idx);
  h.hid = idx;
  h.uid = users_.next();
  h.rec.user_id = "u" + std::to_string(h.uid);
  h.rng = SplitMix64(mix_seed(cfg_.seed ^ 0x4057ull, idx));
  const double lifetime =
      initial ? cfg_.churn.sample_residual_lifetime(churn_rng_) : cfg_.churn.sample_lifetime(churn_rng_);
  h.last_advance = now_;
  h.on = uniform01(h.rng) < h.rec.on_fraction;
  h.connected = uniform01(h.rng) < h.rec.connected_fraction;
  h.allowed = uniform01(h.rng) < h.rec.active_fraction;
  const double share = cfg_.competing_share ? h.rec.resource_share : 1.0;
  h.speed = units::gflops_to_flop_per_day(whole_host_flops(h.rec) * h.rec.cpu_efficiency * share);
  h.bw = units::kbps_to_mb_per_day(h.rec.throughput_down_kbps);
  h.availability = h.rec.on_fraction * h.rec.active_fraction;
  h.next_fetch_allowed = now_;
  h.has_hour_gates = h.rec.preferences.active_hours || h.rec.preferences.comm_hours;

  count_alive(+1);
  if (initial)
    ++report_.initial_hosts;
  else
    ++report_.host_arrivals;
  if (now_ + lifetime < cfg_.duration_days) schedule(now_ + lifetime, EventType::Departure, idx);
  schedule_toggle(idx, EventType::ToggleOn);
  schedule_toggle(idx, EventType::ToggleConnected);
  schedule_toggle(idx, EventType::ToggleActive);
  if (h.has_hour_gates) schedule_hour_boundary(idx);
  reschedule(idx);
}

void Engine::depart(std::uint32_t idx) {
  Host& h = hosts_[idx];
  if (!h.alive) return;
  advance(h);
  if (h.running != kNone) partial_flop_ += replicas_[h.running].flop_done;
  h.alive = false;
  ++h.compute_gen;
  ++h.dl_gen;
  ++h.fetch_gen;
  if (capped_.erase(idx) > 0) recompute_capped();
  h.queue.clear();
  h.queue.shrink_to_fit();
  h.done.clear();
  h.done.shrink_to_fit();
  count_alive(-1);
  ++report_.host_departures;
}

void Engine::advance(Host& h) {
  const double dt = now_ - h.last_advance;
  h.last_advance = now_;
  if (dt <= 0.0 || !h.alive) return;
  h.alive_time += dt;
  if (h.on) h.on_time += dt;
  if (h.connected) h.connected_time += dt;
  if (h.allowed) h.active_time += dt;
  if (h.running != kNone && h.compute_rate > 0.0) {
    Replica& r = replicas_[h.running];
    const double d = std::min(r.flop_remaining, h.compute_rate * dt);
    r.flop_remaining -= d;
    r.flop_done += d;
  }
  if (h.downloading != kNone && h.dl_rate > 0.0) {
    Replica& r = replicas_[h.downloading];
    r.dl_remaining = std::max(0.0, r.dl_remaining - h.dl_rate * dt);
  }
}

void Engine::reschedule(std::uint32_t idx) {
  Host& h = hosts_[idx];
  if (!h.alive) return;
  const bool comm = can_comm(h);
  if (comm) try_rpc(idx);

  if (h.running == kNone) {
    for (auto slot : h.queue)
      if (replicas_[slot].dl_remaining <= 0.0) {
        h.running = slot;
        break;
      }
  }
  const double rate = h.running != kNone && can_compute(h) ? h.speed : 0.0;
  if (h.running != h.compute_slot || rate != h.compute_rate) {
    ++h.compute_gen;
    h.compute_slot = h.running;
    h.compute_rate = rate;
    if (rate > 0.0) schedule(now_ + replicas_[h.running].flop_remaining / rate, EventType::ComputeDone, idx, h.compute_gen);
  }

  if (h.downloading == kNone) {
    for (auto slot : h.queue)
      if (replicas_[slot].dl_remaining > 0.0) {
        h.downloading = slot;
        break;
      }
  }
  update_downloads(idx, comm && h.downloading != kNone && h.bw > 0.0);

  if (comm && !h.rpc_pending && now_ < h.next_fetch_allowed && h.fetch_timer_at != h.next_fetch_allowed) {
    int n = 0;
    if (estimate_fetch(h, n) && h.next_fetch_allowed < cfg_.duration_days) {
      h.fetch_timer_at = h.next_fetch_allowed;
      schedule(h.next_fetch_allowed, EventType::FetchTimer, idx, ++h.fetch_gen);
    }
  }
}

void Engine::update_downloads(std::uint32_t idx, bool want) {
  Host& h = hosts_[idx];
  if (!cap_mb_per_day_) {
    const double rate = want ? h.bw : 0.0;
    if (h.downloading != h.dl_slot || rate != h.dl_rate) {
      ++h.dl_gen;
      h.dl_slot = h.downloading;
      h.dl_rate = rate;
      if (rate > 0.0)
        schedule(now_ + replicas_[h.downloading].dl_remaining / rate, EventType::DownloadDone, idx, h.dl_gen);
    }
    return;
  }
  const bool member = capped_.count(idx) > 0;
  if (want == member && (!want || h.downloading == h.dl_slot)) return;
  if (want) {
    capped_.insert(idx);
  } else {
    capped_.erase(idx);
    ++h.dl_gen;
    h.dl_rate = 0.0;
    h.dl_slot = kNone;
  }
  recompute_capped();
}

// Max-min fair split of the server egress among active downloads.
void Engine::recompute_capped() {
  std::vector<std::uint32_t> members(capped_.begin(), capped_.end());
  for (auto m : members) advance(hosts_[m]);
  std::stable_sort(members.begin(), members.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return hosts_[a].bw < hosts_[b].bw; });
  double remaining = cap_mb_per_day_;
  for (std::size_t i = 0; i < members.size(); ++i) {
    Host& h = hosts_[members[i]];
    const double fair = remaining / static_cast<double>(members.size() - i);
    const double rate = std::min(h.bw, fair);
    remaining -= rate;
    ++h.dl_gen;
    h.dl_rate = rate;
    h.dl_slot = h.downloading;
    if (rate > 0.0)
      schedule(now_ + replicas_[h.downloading].dl_remaining / rate, EventType::DownloadDone, members[i], h.dl_gen);
  }
}

bool Engine::estimate_fetch(const Host& h, int& n_tasks) const {
  n_tasks = 0;
  if (!(h.speed > 0.0) || !(h.bw > 0.0) || !(h.availability > 0.0)) return false;
  FetchContext ctx;
  for (auto slot : h.queue) {
    const Replica& r = replicas_[slot];
    ctx.buffered_days += std::max(r.flop_remaining / h.speed, r.dl_remaining / h.bw) / h.availability;
  }
  ctx.task_days = std::max(cfg_.task.flops_per_task / h.speed, cfg_.task.input_size_mb / h.bw) / h.availability;
  ctx.min_connection_interval_days = h.rec.preferences.min_connection_interval_days;
  ctx.work_buffer_days = cfg_.work_buffer_days;
  n_tasks = policy_.tasks_to_request(ctx);
  return n_tasks > 0;
}

void Engine::try_rpc(std::uint32_t idx) {
  Host& h = hosts_[idx];
  if (h.rpc_pending) return;
  int n = 0;
  const bool fetch_ready = now_ >= h.next_fetch_allowed && estimate_fetch(h, n);
  if (h.done.empty() && !fetch_ready) return;
  if (h.rec.preferences.confirm_before_connect && cfg_.confirm_delay_hours > 0.0) {
    h.rpc_pending = true;
    schedule(now_ + exponential(h.rng, cfg_.confirm_delay_hours / units::kHoursPerDay), EventType::Rpc, idx);
    return;
  }
  do_rpc(idx);
}

void Engine::do_rpc(std::uint32_t idx) {
  Host& h = hosts_[idx];
  std::vector<std::uint32_t> done;
  done.swap(h.done);
  for (auto slot : done)
    report(slot, replicas_[slot].erroneous ? ResultOutcome::Erroneous : ResultOutcome::Correct);

  int n = 0;
  if (now_ >= h.next_fetch_allowed && estimate_fetch(h, n)) {
    assign_work(idx, n);
    ++report_.work_fetches;
    if (h.last_fetch) {
      const double gap = now_ - *h.last_fetch;
      const double slack = gap - h.rec.preferences.min_connection_interval_days;
      report_.min_fetch_spacing_days = std::min(report_.min_fetch_spacing_days.value_or(gap), gap);
      report_.min_fetch_slack_days = std::min(report_.min_fetch_slack_days.value_or(slack), slack);
    }
    h.last_fetch = now_;
    h.next_fetch_allowed = now_ + h.rec.preferences.min_connection_interval_days;
  }
}

std::uint32_t Engine::take_pending(std::uint64_t uid) {
  const auto limit = std::min<std::size_t>(pending_.size(), kPendingScan);
  for (std::size_t i = 0; i < limit; ++i) {
    const auto slot = pending_[i];
    const auto& users = units_[slot].users;
    if (std::find(users.begin(), users.end(), uid) == users.end()) {
      pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(i));
      --units_[slot].queued;
      return slot;
    }
  }
  return kNone;
}

std::uint32_t Engine::new_unit() {
  std::uint32_t slot;
  if (!free_units_.empty()) {
    slot = free_units_.back();
    free_units_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(units_.size());
    units_.emplace_back();
  }
  Unit& u = units_[slot];
  u.live = true;
  u.issued = cfg_.min_quorum;
  u.outstanding = u.correct = u.executed = 0;
  u.queued = cfg_.min_quorum - 1;
  u.users.clear();
  u.results.clear();
  ++units_created_;
  for (int k = 1; k < cfg_.min_quorum; ++k) pending_.push_back(slot);
  return slot;
}

void Engine::free_unit(std::uint32_t slot) {
  Unit& u = units_[slot];
  u.live = false;
  u.users.clear();
  u.results.clear();
  free_units_.push_back(slot);
}

void Engine::assign_work(std::uint32_t idx, int n) {
  for (int k = 0; k < n; ++k) {
    auto slot = take_pending(hosts_[idx].uid);
    if (slot == kNone) {
      if (cfg_.max_work_units > 0 && units_created_ >= cfg_.max_work_units) break;
      slot = new_unit();
    }
    send_replica(slot, idx);
  }
}

void Engine::send_replica(std::uint32_t unit_slot, std::uint32_t host_idx) {
  std::uint32_t slot;
  if (!free_replicas_.empty()) {
    slot = free_replicas_.back();
    free_replicas_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(replicas_.size());
    replicas_.emplace_back();
  }
  Replica& r = replicas_[slot];
  r.live = true;
  r.unit = unit_slot;
  r.host = host_idx;
  r.dl_remaining = cfg_.task.input_size_mb;
  r.flop_remaining = cfg_.task.flops_per_task;
  r.flop_done = 0.0;
  r.erroneous = false;
  Unit& u = units_[unit_slot];
  u.users.push_back(hosts_[host_idx].uid);
  ++u.outstanding;
  ++report_.replicas_sent;
  hosts_[host_idx].queue.push_back(slot);
  schedule(now_ + cfg_.task.deadline_days, EventType::Deadline, slot, r.gen);
}

void Engine::report(std::uint32_t slot, ResultOutcome outcome) {
  Replica& r = replicas_[slot];
  const auto unit_slot = r.unit;
  Unit& u = units_[unit_slot];
  const Host& h = hosts_[r.host];
  u.results.push_back(ResultRecord{h.hid, h.uid, outcome, now_});
  --u.outstanding;
  switch (outcome) {
    case ResultOutcome::Correct:
      ++u.correct;
      ++u.executed;
      ++report_.results_correct;
      break;
    case ResultOutcome::Erroneous:
      ++u.executed;
      ++report_.results_erroneous;
      break;
    case ResultOutcome::TimedOut: ++report_.results_timed_out; break;
    case ResultOutcome::Lost: ++report_.results_lost; break;
  }
  r.live = false;
  ++r.gen;
  free_replicas_.push_back(slot);
  evaluate(unit_slot);
}

void Engine::evaluate(std::uint32_t unit_slot) {
  Unit& u = units_[unit_slot];
  if (u.correct >= cfg_.min_quorum) {
    ++report_.validated_units;
    executed_in_validated_ += static_cast<std::uint64_t>(u.executed);
    free_unit(unit_slot);
    return;
  }
  if (u.outstanding > 0 || u.queued > 0) return;
  const auto decision = validate_quorum(u.results, cfg_.min_quorum, cfg_.max_replicas);
  if (decision.kind == QuorumDecision::Kind::NeedMore) {
    u.issued += decision.more;
    u.queued += decision.more;
    for (int k = 0; k < decision.more; ++k) pending_.push_back(unit_slot);
  } else {
    ++report_.invalid_units;
    free_unit(unit_slot);
  }
}

void Engine::on_compute_done(std::uint32_t idx, std::uint64_t gen) {
  Host& h = hosts_[idx];
  if (!h.alive || gen != h.compute_gen) return;
  advance(h);
  const auto slot = h.running;
  Replica& r = replicas_[slot];
  r.flop_done += r.flop_remaining;
  r.flop_remaining = 0.0;
  r.erroneous = uniform01(outcome_rng_) < cfg_.error_rate;
  ++completed_replicas_;
  erase_value(h.queue, slot);
  h.done.push_back(slot);
  h.running = kNone;
  reschedule(idx);
}

void Engine::on_download_done(std::uint32_t idx, std::uint64_t gen) {
  Host& h = hosts_[idx];
  if (!h.alive || gen != h.dl_gen) return;
  advance(h);
  replicas_[h.downloading].dl_remaining = 0.0;
  ++report_.replicas_downloaded;
  h.downloading = kNone;
  reschedule(idx);
}

void Engine::on_deadline(std::uint32_t slot, std::uint64_t gen) {
  Replica& r = replicas_[slot];
  if (!r.live || r.gen != gen) return;
  const auto idx = r.host;
  Host& h = hosts_[idx];
  if (!h.alive) {
    report(slot, ResultOutcome::Lost);
    return;
  }
  advance(h);
  if (h.running == slot) {
    partial_flop_ += r.flop_done;
    h.running = kNone;
    h.compute_slot = kNone;
    h.compute_rate = 0.0;
    ++h.compute_gen;
  }
  if (h.downloading == slot) {
    h.downloading = kNone;
    h.dl_slot = kNone;
    ++h.dl_gen;
  }
  erase_value(h.queue, slot);
  erase_value(h.done, slot);
  report(slot, ResultOutcome::TimedOut);
  reschedule(idx);
}

void Engine::take_sample() {
  TimelineSample s;
  s.time_days = now_;
  s.active_hosts = alive_;
  s.validated_units = report_.validated_units;
  const double seconds = now_ * units::kSecondsPerDay;
  if (seconds > 0.0) {
    s.achieved_flops = static_cast<double>(report_.validated_units) * cfg_.task.flops_per_task / seconds / units::kGiga;
    s.raw_flops = (static_cast<double>(completed_replicas_) * cfg_.task.flops_per_task + partial_flop_) / seconds /
                  units::kGiga;
  }
  s.bytes_downloaded_mb = static_cast<double>(report_.replicas_downloaded) * cfg_.task.input_size_mb;
  report_.timeline.push_back(s);
}

SimReport Engine::run() {
  const double duration = cfg_.duration_days;
  schedule(duration, EventType::End, 0);

  std::size_t initial = 0;
  if (cfg_.initial_hosts) {
    initial = *cfg_.initial_hosts;
  } else {
    const double mean = cfg_.churn.rate_at(0.0) * cfg_.churn.mean_lifetime();
    if (mean > 0.0) initial = static_cast<std::size_t>(std::poisson_distribution<long long>(mean)(churn_rng_));
  }
  for (std::size_t i = 0; i < initial; ++i) create_host(true);
  if (double t = cfg_.churn.next_arrival(0.0, churn_rng_); t < duration) schedule(t, EventType::Arrival, 0);
  schedule(0.0, EventType::Sample, 0);

  while (!events_.empty()) {
    const Event ev = events_.top();
    events_.pop();
    now_ = ev.t;
    if (ev.type == EventType::End) break;
    switch (ev.type) {
      case EventType::Sample:
        take_sample();
        if (now_ + cfg_.sample_interval_days < duration)
          schedule(now_ + cfg_.sample_interval_days, EventType::Sample, 0);
        break;
      case EventType::Arrival:
        create_host(false);
        if (double t = cfg_.churn.next_arrival(now_, churn_rng_); t < duration) schedule(t, EventType::Arrival, 0);
        break;
      case EventType::Departure: depart(ev.target); break;
      case EventType::ToggleOn:
      case EventType::ToggleConnected:
      case EventType::ToggleActive: {
        Host& h = hosts_[ev.target];
        if (!h.alive) break;
        advance(h);
        bool& state = ev.type == EventType::ToggleOn ? h.on : ev.type == EventType::ToggleConnected ? h.connected : h.allowed;
        state = !state;
        schedule_toggle(ev.target, ev.type);
        reschedule(ev.target);
        break;
      }
      case EventType::HourBoundary: {
        Host& h = hosts_[ev.target];
        if (!h.alive) break;
        advance(h);
        schedule_hour_boundary(ev.target);
        reschedule(ev.target);
        break;
      }
      case EventType::ComputeDone: on_compute_done(ev.target, ev.tag); break;
      case EventType::DownloadDone: on_download_done(ev.target, ev.tag); break;
      case EventType::FetchTimer: {
        Host& h = hosts_[ev.target];
        if (!h.alive || ev.tag != h.fetch_gen) break;
        h.fetch_timer_at = -1.0;
        advance(h);
        reschedule(ev.target);
        break;
      }
      case EventType::Rpc: {
        Host& h = hosts_[ev.target];
        h.rpc_pending = false;
        if (!h.alive) break;
        advance(h);
        if (can_comm(h)) do_rpc(ev.target);
        reschedule(ev.target);
        break;
      }
      case EventType::Deadline: on_deadline(ev.target, ev.tag); break;
      case EventType::End: break;
    }
  }

  now_ = duration;
  double alive_time = 0.0, on_time = 0.0, connected_time = 0.0, active_time = 0.0;
  for (auto& h : hosts_) {
    if (h.alive) {
      advance(h);
      if (h.running != kNone) partial_flop_ += replicas_[h.running].flop_done;
    }
    alive_time += h.alive_time;
    on_time += h.on_time;
    connected_time += h.connected_time;
    active_time += h.active_time;
  }
  count_alive(0);

  SimReport& rep = report_;
  rep.duration_days = duration;
  rep.mean_lifetime_days = cfg_.churn.mean_lifetime();
  rep.min_quorum = cfg_.min_quorum;
  const double seconds = duration * units::kSecondsPerDay;
  rep.achieved_flops = static_cast<double>(rep.validated_units) * cfg_.task.flops_per_task / seconds / units::kGiga;
  rep.raw_flops =
      (static_cast<double>(completed_replicas_) * cfg_.task.flops_per_task + partial_flop_) / seconds / units::kGiga;
  rep.bytes_downloaded_mb = static_cast<double>(rep.replicas_downloaded) * cfg_.task.input_size_mb;
  rep.mean_active_hosts = alive_area_ / duration;
  rep.replicas_per_validated_task =
      rep.validated_units > 0
          ? static_cast<double>(executed_in_validated_) / static_cast<double>(rep.validated_units)
          : 0.0;
  if (alive_time > 0.0) {
    rep.observed_on_fraction = on_time / alive_time;
    rep.observed_connected_fraction = connected_time / alive_time;
    rep.observed_active_fraction = active_time / alive_time;
  }
  return std::move(report_);
}

}  // namespace

SimReport run_simulation(const SimConfig& config) {
  config.validate();
  Engine engine(config);
  return engine.run();
}

}  // namespace volpool

