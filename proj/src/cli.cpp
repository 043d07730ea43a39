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


#include "volpool/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "volpool/error.hpp"

namespace volpool {

namespace fs = std::filesystem;

namespace {

std::string provenance_line(const RunConfig& rc) {
  return "# seed=" + std::to_string(rc.seed) + " config_hash=" + rc.config_hash() + "\n";
}

Json provenance(const RunConfig& rc) { return Json{{"seed", rc.seed}, {"config_hash", rc.config_hash()}}; }

void write_text(const RunConfig& rc, const std::string& name, const std::string& body) {
  fs::create_directories(rc.out_dir);
  const auto path = fs::path(rc.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << provenance_line(rc) << body;
}

void write_json(const RunConfig& rc, const std::string& name, Json body) {
  Json doc;
  doc["_provenance"] = provenance(rc);
  for (auto& [k, v] : body.items()) doc[k] = v;
  fs::create_directories(rc.out_dir);
  const auto path = fs::path(rc.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Json rows_json(std::span<const BreakdownRow> rows) {
  Json a = Json::array();
  for (const auto& r : rows)
    a.push_back(Json{{"key", r.key},
                     {"n_hosts", r.n_hosts},
                     {"mean_flops", r.mean_flops},
                     {"total_flops", r.total_flops},
                     {"mean_disk_free", r.mean_disk_free},
                     {"mean_throughput", r.mean_throughput}});
  return a;
}

Json rows_json(std::span<const UserBucketRow> rows) {
  Json a = Json::array();
  for (const auto& r : rows)
    a.push_back(Json{{"bucket", r.bucket}, {"n_users", r.n_users}, {"n_hosts", r.n_hosts}, {"pct_hosts", r.pct_hosts}});
  return a;
}

Json histogram_json(const Histogram& h) {
  return Json{{"field_name", h.field_name},
              {"bin_edges", h.bin_edges},
              {"counts", h.counts},
              {"overflow", h.overflow},
              {"non_finite", h.non_finite}};
}

template <class Fn>
int guarded(const char* command, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::cerr << "volpool " << command << ": " << e.what() << '\n';
  } catch (const Json::exception& e) {
    std::cerr << "volpool " << command << ": config error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    std::cerr << "volpool " << command << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "volpool " << command << ": " << e.what() << '\n';
  }
  return kExitInputError;
}

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::llround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(lo + step * i);
  return out;
}

struct HistSpec {
  const char* name;
  HostField field;
  std::vector<double> edges;
};

std::vector<HistSpec> default_histograms() {
  return {{"flops", HostField::FlopsPerCpu, steps(0.0, 6.0, 0.25)},
          {"iops", HostField::IopsPerCpu, steps(0.0, 8.0, 0.25)},
          {"ram", HostField::Ram, steps(0.0, 4096.0, 128.0)},
          {"swap", HostField::Swap, steps(0.0, 8.0, 0.25)},
          {"throughput", HostField::Throughput, steps(0.0, 2000.0, 50.0)},
          {"disk_total", HostField::DiskTotal, steps(0.0, 400.0, 10.0)},
          {"disk_free", HostField::DiskFree, steps(0.0, 300.0, 10.0)},
          {"tz", HostField::TzOffset, steps(-43200.0, 50400.0, 3600.0)},
          {"lifetime", HostField::LifetimeDays, steps(0.0, 720.0, 30.0)}};
}

std::string require_input(const RunConfig& rc) {
  require(rc.input.has_value(), "no input file (set \"input\" in the config or pass --input)");
  return *rc.input;
}

}  // namespace

std::vector<double> default_rate_grid() {
  return {0, 1, 2, 5, 10, 20, 50, 100, 200, 450, 500, 1000, 2000, 5000, 10000};
}

int cmd_ingest(const RunConfig& rc) {
  return guarded("ingest", [&] {
    const auto parsed = parse_hosts_file(require_input(rc));
    std::ostringstream hosts, rejects;
    serialize_hosts(hosts, parsed.records);
    serialize_rejects(rejects, parsed.rejects);
    write_text(rc, "hosts.parsed.csv", hosts.str());
    write_text(rc, "rejects.csv", rejects.str());
    std::cout << "accepted " << parsed.records.size() << " records, rejected " << parsed.rejects.size() << '\n';
    require(!parsed.records.empty(), "no records accepted");
    return kExitOk;
  });
}

int cmd_ingest(const std::string& input_path, const std::string& out_dir) {
  Overrides o;
  o.input = input_path;
  o.out_dir = out_dir;
  return guarded("ingest", [&] { return cmd_ingest(make_run_config(Json::object(), o)); });
}

int cmd_stats(const RunConfig& rc) {
  return guarded("stats", [&] {
    const auto parsed = parse_hosts_file(require_input(rc));
    const auto& records = parsed.records;
    require(!records.empty(), "no host records");
    const Json cfg = rc.doc.contains("stats") ? rc.doc["stats"] : Json::object();
    std::vector<HistSpec> hists = default_histograms();
    std::vector<std::string> bin_keys;
    for (const auto& h : hists) bin_keys.emplace_back(h.name);
    require(cfg.is_object(), "stats: expected an object");
    for (const auto& [key, value] : cfg.items())
      require(key == "now_utc" || key == "bins", "stats: unknown key '" + key + "'");
    if (cfg.contains("bins")) {
      for (const auto& [name, edges] : cfg["bins"].items()) {
        auto it = std::find_if(hists.begin(), hists.end(), [&](const HistSpec& h) { return name == h.name; });
        require(it != hists.end(), "stats.bins: unknown histogram '" + name + "'");
        it->edges = edges.get<std::vector<double>>();
        check_bin_edges(it->edges);
      }
    }
    std::int64_t now = 0;
    for (const auto& h : records) now = std::max(now, h.last_contact_utc);
    if (cfg.contains("now_utc")) now = cfg["now_utc"].get<std::int64_t>();

    const bool csv = rc.format == OutputFormat::Csv;
    const std::pair<const char*, BreakdownKey> keys[] = {{"vendor", BreakdownKey::CpuVendor},
                                                         {"os", BreakdownKey::Os},
                                                         {"country", BreakdownKey::Country},
                                                         {"venue", BreakdownKey::Venue}};
    for (const auto& [name, key] : keys) {
      const auto rows = breakdown(records, key);
      const std::string file = std::string("breakdown_") + name;
      if (csv) {
        std::ostringstream s;
        write_breakdown_csv(s, rows);
        write_text(rc, file + ".csv", s.str());
      } else {
        write_json(rc, file + ".json", Json{{"key", to_string(key)}, {"rows", rows_json(rows)}});
      }
    }
    const auto users = hosts_per_user(records);
    if (csv) {
      std::ostringstream s;
      write_hosts_per_user_csv(s, users);
      write_text(rc, "hosts_per_user.csv", s.str());
    } else {
      write_json(rc, "hosts_per_user.json", Json{{"rows", rows_json(users)}});
    }
    for (const auto& spec : hists) {
      Histogram h;
      if (spec.field == HostField::LifetimeDays) {
        try {
          h = lifetime_stats(records, now, spec.edges).histogram;
        } catch (const Error&) {
          h = make_histogram({}, spec.edges, "lifetime");
        }
      } else {
        h = histogram(records, spec.field, spec.edges);
      }
      const std::string file = std::string("hist_") + spec.name;
      if (csv) {
        std::ostringstream s;
        write_histogram_csv(s, h);
        write_text(rc, file + ".csv", s.str());
      } else {
        write_json(rc, file + ".json", histogram_json(h));
      }
    }
    std::cout << "wrote statistics for " << records.size() << " hosts to " << rc.out_dir << '\n';
    return kExitOk;
  });
}

int cmd_stats(const std::string& input_path, const std::string& out_dir) {
  Overrides o;
  o.input = input_path;
  o.out_dir = out_dir;
  return guarded("stats", [&] { return cmd_stats(make_run_config(Json::object(), o)); });
}

int cmd_capacity(const RunConfig& rc, bool check) {
  return guarded("capacity", [&] {
    const Json cap = rc.doc.contains("capacity") ? rc.doc["capacity"] : Json();
    const auto f = factors_from_json(cap);
    const double hardware = f.hardware_product();
    const double utilization = utilization_product(f);
    const double potential = potential_flops(f);
    std::cout << "hardware_gflops " << format_double(hardware) << '\n'
              << "utilization " << format_double(utilization) << '\n'
              << "potential_gflops " << format_double(potential) << '\n';
    Json body{{"factors", to_json(f)},
              {"hardware_gflops", hardware},
              {"utilization", utilization},
              {"potential_gflops", potential},
              {"potential_tflops", potential / 1e3}};
    if (rc.doc.contains("pool")) {
      const auto spec = pool_spec_from_json(rc.doc["pool"], rc.seed, 10000);
      const auto pool = generate_pool(spec);
      std::vector<std::string> names = {"on_fraction"};
      if (cap.is_object() && cap.contains("storage_factors"))
        names = cap["storage_factors"].get<std::vector<std::string>>();
      const auto selection = parse_factor_selection(names);
      body["pool"] = Json{{"n_hosts", pool.size()},
                          {"hardware_gflops", hardware_flops(pool)},
                          {"storage_factors", names},
                          {"storage_gb", storage_potential(pool, f, selection)},
                          {"access_rate_bytes_per_s", access_rate(pool, f, AccessSource::from_network())}};
    }
    write_json(rc, "capacity.json", body);
    if (check && !(utilization >= 0.0 && utilization <= 1.0 && potential <= hardware)) {
      std::cerr << "volpool capacity: check failed\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  });
}

int cmd_sweep(const RunConfig& rc, bool check) {
  return guarded("sweep", [&] {
    const auto f = factors_from_json(rc.doc.contains("capacity") ? rc.doc["capacity"] : Json());
    const auto spec = pool_spec_from_json(rc.doc.contains("pool") ? rc.doc["pool"] : Json(), rc.seed, 50000);
    std::vector<double> grid = default_rate_grid();
    CurveMode mode = CurveMode::PoolAverage;
    if (rc.doc.contains("sweep")) {
      const auto& s = rc.doc["sweep"];
      require(s.is_object(), "sweep: expected an object");
      for (const auto& [key, value] : s.items())
        require(key == "grid" || key == "mode", "sweep: unknown key '" + key + "'");
      if (s.contains("grid")) grid = s["grid"].get<std::vector<double>>();
      if (s.contains("mode")) {
        const auto m = s["mode"].get<std::string>();
        require(m == "pool_average" || m == "per_host", "sweep: mode must be pool_average or per_host");
        mode = m == "per_host" ? CurveMode::PerHost : CurveMode::PoolAverage;
      }
    }
    const auto pool = generate_pool(spec);
    const auto curve = compute_vs_rate_curve(pool, grid, f, mode);
    if (rc.format == OutputFormat::Csv) {
      std::ostringstream s;
      s << "data_rate,total_gflops,unsaturated_fraction\n";
      for (const auto& p : curve)
        s << format_double(p.data_rate) << ',' << format_double(p.total_flops) << ','
          << format_double(p.unsaturated_fraction) << '\n';
      write_text(rc, "rate_curve.csv", s.str());
    } else {
      Json rows = Json::array();
      for (const auto& p : curve)
        rows.push_back(Json{{"data_rate", p.data_rate},
                            {"total_gflops", p.total_flops},
                            {"unsaturated_fraction", p.unsaturated_fraction}});
      write_json(rc, "rate_curve.json", Json{{"rows", rows}});
    }
    std::cout << "wrote " << curve.size() << " sweep points for " << pool.size() << " hosts\n";
    if (check) {
      bool ok = true;
      for (std::size_t i = 1; i < curve.size(); ++i)
        ok = ok && curve[i].total_flops <= curve[i - 1].total_flops &&
             curve[i].unsaturated_fraction <= curve[i - 1].unsaturated_fraction;
      if (!ok) {
        std::cerr << "volpool sweep: curve is not non-increasing\n";
        return kExitCheckFailed;
      }
    }
    return kExitOk;
  });
}

int cmd_simulate(const RunConfig& rc, bool check) {
  return guarded("simulate", [&] {
    const auto cfg = sim_config_from_json(rc.doc.contains("sim") ? rc.doc["sim"] : Json(), rc.seed);
    const auto report = run_simulation(cfg);
    write_json(rc, "sim_report.json", to_json(report));

    if (rc.format == OutputFormat::Csv) {
      std::ostringstream s;
      s << "time_days,active_hosts,validated_units,achieved_gflops,raw_gflops,bytes_downloaded_mb\n";
      for (const auto& t : report.timeline)
        s << format_double(t.time_days) << ',' << t.active_hosts << ',' << t.validated_units << ','
          << format_double(t.achieved_flops) << ',' << format_double(t.raw_flops) << ','
          << format_double(t.bytes_downloaded_mb) << '\n';
      write_text(rc, "timeline.csv", s.str());
    } else {
      Json rows = Json::array();
      for (const auto& t : report.timeline)
        rows.push_back(Json{{"time_days", t.time_days},
                            {"active_hosts", t.active_hosts},
                            {"validated_units", t.validated_units},
                            {"achieved_gflops", t.achieved_flops},
                            {"raw_gflops", t.raw_flops},
                            {"bytes_downloaded_mb", t.bytes_downloaded_mb}});
      write_json(rc, "timeline.json", Json{{"rows", rows}});
    }

    const auto factors = cfg.analytic_factors();
    Json cmp{{"factors", to_json(factors)}};
    bool within = true;
    try {
      const auto c = analytic_comparison(report, factors);
      cmp["applicable"] = true;
      const Json cj = to_json(c);
      for (auto& [k, v] : cj.items()) cmp[k] = v;
      within = c.relative_error < 0.05;
    } catch (const Error& e) {
      cmp["applicable"] = false;
      cmp["reason"] = e.what();
    }
    write_json(rc, "analytic_comparison.json", cmp);
    std::cout << "achieved_gflops " << format_double(report.achieved_flops) << '\n'
              << "mean_active_hosts " << format_double(report.mean_active_hosts) << '\n';
    if (check && !within) {
      std::cerr << "volpool simulate: achieved capacity differs from the analytic prediction by 5% or more\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Volunteer computing capacity toolkit", "volpool"};
  std::string command, config_path, format;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir, input;
  bool check = false;
  app.add_option("command", command, "ingest, stats, capacity, sweep or simulate")
      ->required()
      ->check(CLI::IsMember({"ingest", "stats", "capacity", "sweep", "simulate"}));
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--input", input, "host CSV for ingest and stats");
  app.add_flag("--check", check, "exit 1 when a property check fails");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  Overrides o;
  o.seed = seed;
  o.out_dir = out_dir;
  if (!format.empty()) o.format = format;
  o.input = input;
  RunConfig rc;
  const int load = guarded(command.c_str(), [&] {
    rc = load_run_config(config_path, o);
    return kExitOk;
  });
  if (load != kExitOk) return load;

  if (command == "ingest") return cmd_ingest(rc);
  if (command == "stats") return cmd_stats(rc);
  if (command == "capacity") return cmd_capacity(rc, check);
  if (command == "sweep") return cmd_sweep(rc, check);
  return cmd_simulate(rc, check);
}

}  // namespace volpool
