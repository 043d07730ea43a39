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


#include "volpool/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

#include "volpool/error.hpp"

namespace volpool {

namespace {

void check_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  require(j.is_object(), std::string(where) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    require(ok, std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<double> read_doubles(const Json& j) { return j.get<std::vector<double>>(); }

template <class E, class Parse>
Weights<E> read_weights(const Json& j, std::string_view what, Parse parse) {
  require(j.is_object(), std::string(what) + ": expected an object of weights");
  Weights<E> out;
  for (const auto& [key, value] : j.items()) {
    auto parsed = parse(key);
    require(parsed.has_value(), std::string(what) + ": unknown category '" + key + "'");
    out.emplace_back(*parsed, value.template get<double>());
  }
  return out;
}

HostField read_field(const std::string& name) {
  auto f = parse_field(name);
  require(f.has_value(), "unknown host field '" + name + "'");
  return *f;
}

}  // namespace

std::string RunConfig::config_hash() const {
  // The output location does not influence any result.
  Json canonical = doc;
  canonical.erase("out");
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig make_run_config(Json doc, const Overrides& o) {
  if (doc.is_null()) doc = Json::object();
  require(doc.is_object(), "config: top level must be an object");
  check_keys(doc, "config", {"seed", "out", "format", "input", "pool", "capacity", "sweep", "stats", "sim"});
  if (o.seed) doc["seed"] = *o.seed;
  if (o.out_dir) doc["out"] = *o.out_dir;
  if (o.format) doc["format"] = *o.format;
  if (o.input) doc["input"] = *o.input;

  RunConfig rc;
  if (doc.contains("seed")) {
    require(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0,
            "config: seed must be a non-negative integer");
    rc.seed = doc["seed"].get<std::uint64_t>();
  }
  read(doc, "out", rc.out_dir);
  if (doc.contains("format")) {
    const auto f = doc["format"].get<std::string>();
    require(f == "csv" || f == "json", "config: format must be csv or json");
    rc.format = f == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  }
  if (doc.contains("input")) rc.input = doc["input"].get<std::string>();
  rc.doc = std::move(doc);
  return rc;
}

RunConfig load_run_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read config " + path);
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw Error("config " + path + ": " + e.what());
  }
  return make_run_config(std::move(doc), overrides);
}

Json to_json(const FieldGenerator& g) {
  using K = FieldGenerator::Kind;
  const auto& p = g.params();
  switch (g.kind()) {
    case K::Constant: return Json{{"kind", "constant"}, {"value", p[0]}};
    case K::Uniform: return Json{{"kind", "uniform"}, {"lo", p[0]}, {"hi", p[1]}};
    case K::Exponential: return Json{{"kind", "exponential"}, {"mean", p[0]}};
    case K::LogNormal: return Json{{"kind", "lognormal"}, {"mean", p[0]}, {"cv", p[1]}};
    case K::Beta: return Json{{"kind", "beta"}, {"mean", p[0]}, {"concentration", p[1]}};
    case K::Discrete: return Json{{"kind", "discrete"}, {"values", p}, {"weights", g.weights()}};
    case K::Empirical: {
      const auto s = g.empirical_dist()->sorted_samples();
      return Json{{"kind", "empirical"},
                  {"samples", std::vector<double>(s.begin(), s.end())},
                  {"interpolate", g.interpolate()}};
    }
    case K::Mixture: {
      Json comps = Json::array();
      for (const auto& c : g.components()) comps.push_back(to_json(c));
      return Json{{"kind", "mixture"}, {"components", comps}, {"weights", g.weights()}};
    }
  }
  return Json();
}

FieldGenerator field_generator_from_json(const Json& j) {
  if (j.is_number()) return FieldGenerator::constant(j.get<double>());
  require(j.is_object() && j.contains("kind"), "generator: expected an object with a kind");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return FieldGenerator::constant(j.at("value").get<double>());
  if (kind == "uniform") return FieldGenerator::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "exponential") return FieldGenerator::exponential(j.at("mean").get<double>());
  if (kind == "lognormal") return FieldGenerator::lognormal(j.at("mean").get<double>(), j.at("cv").get<double>());
  if (kind == "beta")
    return FieldGenerator::beta(j.at("mean").get<double>(), j.value("concentration", 4.0));
  if (kind == "discrete") return FieldGenerator::discrete(read_doubles(j.at("values")), read_doubles(j.at("weights")));
  if (kind == "empirical")
    return FieldGenerator::empirical(EmpiricalDistribution(read_doubles(j.at("samples")), j.value("field", "")),
                                     j.value("interpolate", false));
  if (kind == "mixture") {
    std::vector<FieldGenerator> comps;
    for (const auto& c : j.at("components")) comps.push_back(field_generator_from_json(c));
    return FieldGenerator::mixture(std::move(comps), read_doubles(j.at("weights")));
  }
  throw Error("generator: unknown kind '" + kind + "'");
}

PoolSpec pool_spec_from_json(const Json& j, std::uint64_t default_seed, std::size_t default_hosts) {
  const Json obj = j.is_null() ? Json::object() : j;
  check_keys(obj, "pool",
             {"preset", "n_hosts", "seed", "fields", "disk_free_fraction", "vendor_weights", "os_weights",
              "country_weights", "venue_weights", "hosts_per_user_weights", "vendor_host_flops_mean",
              "country_tz_hours", "preferences", "couplings", "now_utc", "history_days", "mean_lifetime_days"});
  const auto preset = obj.value("preset", std::string("measured"));
  require(preset == "measured" || preset == "empty", "pool: preset must be measured or empty");
  PoolSpec s = preset == "measured" ? PoolSpec::measured_defaults(default_hosts, default_seed) : PoolSpec{};
  s.n_hosts = default_hosts;
  s.seed = default_seed;
  read(obj, "n_hosts", s.n_hosts);
  read(obj, "seed", s.seed);
  if (obj.contains("fields"))
    for (const auto& [name, g] : obj["fields"].items()) s.fields.insert_or_assign(read_field(name), field_generator_from_json(g));
  if (obj.contains("disk_free_fraction")) {
    if (obj["disk_free_fraction"].is_null())
      s.disk_free_fraction.reset();
    else
      s.disk_free_fraction = field_generator_from_json(obj["disk_free_fraction"]);
  }
  if (obj.contains("vendor_weights"))
    s.vendor_weights = read_weights<CpuVendor>(obj["vendor_weights"], "vendor_weights", parse_vendor);
  if (obj.contains("os_weights")) s.os_weights = read_weights<Os>(obj["os_weights"], "os_weights", parse_os);
  if (obj.contains("country_weights"))
    s.country_weights = read_weights<std::string>(obj["country_weights"], "country_weights",
                                                  [](const std::string& k) { return std::optional<std::string>(k); });
  if (obj.contains("venue_weights"))
    s.venue_weights = read_weights<Venue>(obj["venue_weights"], "venue_weights", parse_venue);
  if (obj.contains("hosts_per_user_weights")) {
    auto w = read_doubles(obj["hosts_per_user_weights"]);
    require(w.size() == kUserBuckets, "pool: hosts_per_user_weights needs 5 entries");
    std::copy(w.begin(), w.end(), s.hosts_per_user_weights.begin());
  }
  if (obj.contains("vendor_host_flops_mean")) {
    s.vendor_host_flops_mean.clear();
    for (const auto& [k, v] : obj["vendor_host_flops_mean"].items()) {
      auto vendor = parse_vendor(k);
      require(vendor.has_value(), "vendor_host_flops_mean: unknown vendor '" + k + "'");
      s.vendor_host_flops_mean[*vendor] = v.get<double>();
    }
  }
  if (obj.contains("country_tz_hours")) {
    s.country_tz_hours.clear();
    for (const auto& [k, v] : obj["country_tz_hours"].items()) s.country_tz_hours.emplace(k, field_generator_from_json(v));
  }
  if (obj.contains("preferences")) {
    const auto& p = obj["preferences"];
    check_keys(p, "pool.preferences",
               {"p_run_if_active", "p_active_hours", "active_hours_length", "p_comm_hours", "comm_hours_length",
                "p_confirm_before_connect", "min_connection_interval_days", "disk_max_used_gb", "disk_max_percent",
                "disk_min_free_gb", "disk_access_interval_s"});
    auto& m = s.preferences;
    read(p, "p_run_if_active", m.p_run_if_active);
    read(p, "p_active_hours", m.p_active_hours);
    read(p, "active_hours_length", m.active_hours_length);
    read(p, "p_comm_hours", m.p_comm_hours);
    read(p, "comm_hours_length", m.comm_hours_length);
    read(p, "p_confirm_before_connect", m.p_confirm_before_connect);
    if (p.contains("min_connection_interval_days"))
      m.min_connection_interval_days = field_generator_from_json(p["min_connection_interval_days"]);
    read(p, "disk_max_used_gb", m.base.disk_max_used_gb);
    read(p, "disk_max_percent", m.base.disk_max_percent);
    read(p, "disk_min_free_gb", m.base.disk_min_free_gb);
    read(p, "disk_access_interval_s", m.base.disk_access_interval_s);
  }
  if (obj.contains("couplings")) {
    s.couplings.clear();
    for (const auto& c : obj["couplings"])
      s.couplings.push_back(
          {read_field(c.at("a").get<std::string>()), read_field(c.at("b").get<std::string>()), c.at("rho").get<double>()});
  }
  read(obj, "now_utc", s.now_utc);
  read(obj, "history_days", s.history_days);
  read(obj, "mean_lifetime_days", s.mean_lifetime_days);
  s.validate();
  return s;
}

ChurnModel churn_from_json(const Json& j) {
  const Json obj = j.is_null() ? Json::object() : j;
  check_keys(obj, "churn", {"arrival_rate", "arrivals", "lifetime"});
  ChurnModel c;
  c.arrivals = {{0.0, 20.0}};
  c.lifetime_mean_days = 30.0;
  if (obj.contains("arrival_rate")) c.arrivals = {{0.0, obj["arrival_rate"].get<double>()}};
  if (obj.contains("arrivals")) {
    c.arrivals.clear();
    for (const auto& seg : obj["arrivals"])
      c.arrivals.push_back({seg.at("start_day").get<double>(), seg.at("rate_per_day").get<double>()});
  }
  if (obj.contains("lifetime")) {
    const auto& l = obj["lifetime"];
    check_keys(l, "churn.lifetime", {"kind", "mean_days", "samples"});
    const auto kind = l.value("kind", std::string("exponential"));
    if (kind == "exponential" || kind == "constant") {
      c.lifetime_kind = kind == "exponential" ? ChurnModel::LifetimeKind::Exponential : ChurnModel::LifetimeKind::Constant;
      read(l, "mean_days", c.lifetime_mean_days);
    } else if (kind == "empirical") {
      c.lifetime_kind = ChurnModel::LifetimeKind::Empirical;
      c.lifetime_empirical = EmpiricalDistribution(read_doubles(l.at("samples")), "lifetime");
    } else {
      throw Error("churn.lifetime: unknown kind '" + kind + "'");
    }
  }
  c.validate();
  return c;
}

CapacityFactors factors_from_json(const Json& j) {
  CapacityFactors f = CapacityFactors::measured_defaults();
  if (j.is_null()) return f;
  check_keys(j, "capacity",
             {"arrival_rate", "mean_lifetime", "mean_ncpus", "mean_flops_per_cpu", "hardware_gflops",
              "cpu_efficiency", "on_fraction", "active_fraction", "redundancy", "resource_share",
              "connected_fraction", "storage_factors"});
  read(j, "arrival_rate", f.arrival_rate);
  read(j, "mean_lifetime", f.mean_lifetime);
  read(j, "mean_ncpus", f.mean_ncpus);
  read(j, "mean_flops_per_cpu", f.mean_flops_per_cpu);
  if (j.contains("hardware_gflops")) {
    // A direct hardware total replaces the four-way product.
    f.arrival_rate = 1.0;
    f.mean_lifetime = 1.0;
    f.mean_ncpus = 1.0;
    f.mean_flops_per_cpu = j["hardware_gflops"].get<double>();
  }
  read(j, "cpu_efficiency", f.cpu_efficiency);
  read(j, "on_fraction", f.on_fraction);
  read(j, "active_fraction", f.active_fraction);
  read(j, "redundancy", f.redundancy);
  read(j, "resource_share", f.resource_share);
  read(j, "connected_fraction", f.connected_fraction);
  f.validate();
  return f;
}

Json to_json(const CapacityFactors& f) {
  return Json{{"arrival_rate", f.arrival_rate},         {"mean_lifetime", f.mean_lifetime},
              {"mean_ncpus", f.mean_ncpus},             {"mean_flops_per_cpu", f.mean_flops_per_cpu},
              {"cpu_efficiency", f.cpu_efficiency},     {"on_fraction", f.on_fraction},
              {"active_fraction", f.active_fraction},   {"redundancy", f.redundancy},
              {"resource_share", f.resource_share},     {"connected_fraction", f.connected_fraction}};
}

SimConfig sim_config_from_json(const Json& j, std::uint64_t seed) {
  const Json obj = j.is_null() ? Json::object() : j;
  check_keys(obj, "sim",
             {"duration_days", "churn", "pool", "initial_hosts", "task", "min_quorum", "max_replicas", "error_rate",
              "server_egress_cap_mbps", "competing_share", "mean_on_dwell_hours", "mean_connected_dwell_hours",
              "mean_active_dwell_hours", "confirm_delay_hours", "work_buffer_days", "sample_interval_days",
              "max_work_units"});
  SimConfig c;
  c.seed = seed;
  c.duration_days = 600.0;
  read(obj, "duration_days", c.duration_days);
  c.churn = churn_from_json(obj.contains("churn") ? obj["churn"] : Json());
  c.pool = pool_spec_from_json(obj.contains("pool") ? obj["pool"] : Json(), 0, 0);
  if (obj.contains("initial_hosts")) c.initial_hosts = obj["initial_hosts"].get<std::size_t>();
  if (obj.contains("task")) {
    const auto& t = obj["task"];
    check_keys(t, "sim.task", {"flops_per_task", "input_size_mb", "output_size_mb", "deadline_days", "memory_footprint_mb"});
    read(t, "flops_per_task", c.task.flops_per_task);
    read(t, "input_size_mb", c.task.input_size_mb);
    read(t, "output_size_mb", c.task.output_size_mb);
    read(t, "deadline_days", c.task.deadline_days);
    read(t, "memory_footprint_mb", c.task.memory_footprint_mb);
  }
  read(obj, "min_quorum", c.min_quorum);
  read(obj, "max_replicas", c.max_replicas);
  read(obj, "error_rate", c.error_rate);
  if (obj.contains("server_egress_cap_mbps") && !obj["server_egress_cap_mbps"].is_null())
    c.server_egress_cap_mbps = obj["server_egress_cap_mbps"].get<double>();
  read(obj, "competing_share", c.competing_share);
  read(obj, "mean_on_dwell_hours", c.mean_on_dwell_hours);
  read(obj, "mean_connected_dwell_hours", c.mean_connected_dwell_hours);
  read(obj, "mean_active_dwell_hours", c.mean_active_dwell_hours);
  read(obj, "confirm_delay_hours", c.confirm_delay_hours);
  read(obj, "work_buffer_days", c.work_buffer_days);
  read(obj, "sample_interval_days", c.sample_interval_days);
  read(obj, "max_work_units", c.max_work_units);
  c.validate();
  return c;
}

Json to_json(const SimReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"duration_days", r.duration_days},
              {"mean_lifetime_days", r.mean_lifetime_days},
              {"min_quorum", r.min_quorum},
              {"achieved_gflops", r.achieved_flops},
              {"raw_gflops", r.raw_flops},
              {"bytes_downloaded_mb", r.bytes_downloaded_mb},
              {"mean_active_hosts", r.mean_active_hosts},
              {"replicas_per_validated_task", r.replicas_per_validated_task},
              {"validated_units", r.validated_units},
              {"invalid_units", r.invalid_units},
              {"replicas_sent", r.replicas_sent},
              {"replicas_downloaded", r.replicas_downloaded},
              {"results_correct", r.results_correct},
              {"results_erroneous", r.results_erroneous},
              {"results_timed_out", r.results_timed_out},
              {"results_lost", r.results_lost},
              {"work_fetches", r.work_fetches},
              {"host_arrivals", r.host_arrivals},
              {"host_departures", r.host_departures},
              {"initial_hosts", r.initial_hosts},
              {"min_fetch_spacing_days", opt(r.min_fetch_spacing_days)},
              {"min_fetch_slack_days", opt(r.min_fetch_slack_days)},
              {"observed_on_fraction", r.observed_on_fraction},
              {"observed_connected_fraction", r.observed_connected_fraction},
              {"observed_active_fraction", r.observed_active_fraction}};
}

Json to_json(const AnalyticComparison& c) {
  return Json{{"predicted_gflops", c.predicted}, {"achieved_gflops", c.achieved}, {"relative_error", c.relative_error}};
}

}  // namespace volpool
