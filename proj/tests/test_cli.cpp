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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "volpool/cli.hpp"

using namespace volpool;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("volpool_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

fs::path write_config(const fs::path& dir, const Json& doc) {
  const auto p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

int run(std::vector<std::string> args) {
  std::vector<const char*> argv = {"volpool"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("ingest command") {
  const auto dir = scratch("ingest");
  CHECK(cmd_ingest(test::fixture("hosts10.csv"), (dir / "a").string()) == kExitOk);
  CHECK(fs::exists(dir / "a" / "hosts.parsed.csv"));
  const auto rejects = slurp(dir / "a" / "rejects.csv");
  CHECK(rejects.rfind("# seed=", 0) == 0);
  CHECK(rejects.find("\nline,reason\n") != std::string::npos);
  CHECK(rejects.substr(rejects.find("line,reason\n") + 12).empty());

  CHECK(cmd_ingest(test::fixture("headerless.csv"), (dir / "b").string()) == kExitInputError);
  CHECK(cmd_ingest(test::fixture("missing.csv"), (dir / "c").string()) == kExitInputError);

  CHECK(cmd_ingest(test::fixture("mixed.csv"), (dir / "d").string()) == kExitOk);
  const auto mixed = slurp(dir / "d" / "rejects.csv");
  CHECK(mixed.find("4,disk_free exceeds disk_total") != std::string::npos);

  // The parsed output is itself ingestible.
  CHECK(cmd_ingest((dir / "a" / "hosts.parsed.csv").string(), (dir / "e").string()) == kExitOk);
  auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
  const auto first = body(slurp(dir / "a" / "hosts.parsed.csv"));
  const auto second = body(slurp(dir / "e" / "hosts.parsed.csv"));
  CHECK(first == second);
}

TEST_CASE("stats command writes every table") {
  const auto dir = scratch("stats");
  CHECK(cmd_stats(test::fixture("hosts10.csv"), (dir / "a").string()) == kExitOk);
  CHECK(cmd_stats(test::fixture("hosts10.csv"), (dir / "b").string()) == kExitOk);
  const char* files[] = {"breakdown_vendor.csv", "breakdown_os.csv",  "breakdown_country.csv",
                         "breakdown_venue.csv",  "hosts_per_user.csv", "hist_flops.csv",
                         "hist_iops.csv",        "hist_ram.csv",       "hist_swap.csv",
                         "hist_throughput.csv",  "hist_disk_total.csv", "hist_disk_free.csv",
                         "hist_tz.csv",          "hist_lifetime.csv"};
  for (const char* f : files) {
    INFO(f);
    REQUIRE(fs::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(slurp(dir / "a" / f).rfind("# seed=", 0) == 0);
  }
  const auto vendor = slurp(dir / "a" / "breakdown_vendor.csv");
  CHECK(vendor.find("\nIntel,4,") != std::string::npos);
  CHECK(cmd_stats(test::fixture("empty.csv"), (dir / "c").string()) == kExitInputError);
}

TEST_CASE("stats command in json format") {
  const auto dir = scratch("stats_json");
  const auto cfg = write_config(dir, Json{{"input", test::fixture("hosts10.csv")}, {"format", "json"}});
  CHECK(run({"stats", "--config", cfg.string(), "--out", (dir / "o").string()}) == kExitOk);
  const auto j = read_json(dir / "o" / "breakdown_vendor.json");
  CHECK(j.begin().key() == "_provenance");
  CHECK(j["rows"][0]["key"] == "Intel");
  const auto h = read_json(dir / "o" / "hist_throughput.json");
  CHECK(h["counts"].size() + 1 == h["bin_edges"].size());
}

TEST_CASE("capacity command") {
  const auto dir = scratch("capacity");
  auto cfg = write_config(dir, Json::object());
  CHECK(run({"capacity", "--config", cfg.string(), "--out", (dir / "a").string()}) == kExitOk);
  const auto j = read_json(dir / "a" / "capacity.json");
  CHECK(j["utilization"].get<double>() == doctest::Approx(0.2805).epsilon(0.002));
  CHECK(j["potential_tflops"].get<double>() == doctest::Approx(149.8).epsilon(0.005));

  cfg = write_config(dir, Json{{"capacity", {{"redundancy", 0.5}}}});
  CHECK(run({"capacity", "--config", cfg.string(), "--out", (dir / "b").string()}) == kExitInputError);

  cfg = write_config(dir, Json{{"capacity",
                                {{"hardware_gflops", 1000.0},
                                 {"cpu_efficiency", 1.0},
                                 {"on_fraction", 1.0},
                                 {"active_fraction", 1.0},
                                 {"redundancy", 1.0},
                                 {"resource_share", 1.0}}}});
  CHECK(run({"capacity", "--config", cfg.string(), "--out", (dir / "c").string(), "--check"}) == kExitOk);
  CHECK(read_json(dir / "c" / "capacity.json")["potential_gflops"].get<double>() == doctest::Approx(1000.0));

  cfg = write_config(dir, Json{{"pool", {{"n_hosts", 1000}}}});
  CHECK(run({"capacity", "--config", cfg.string(), "--out", (dir / "d").string()}) == kExitOk);
  CHECK(read_json(dir / "d" / "capacity.json")["pool"]["n_hosts"] == 1000);
}

TEST_CASE("sweep command") {
  const auto dir = scratch("sweep");
  auto cfg = write_config(dir, Json{{"pool", {{"n_hosts", 2000}}}, {"sweep", {{"grid", {0}}}}});
  CHECK(run({"sweep", "--config", cfg.string(), "--out", (dir / "a").string()}) == kExitOk);
  std::istringstream in(slurp(dir / "a" / "rate_curve.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == "data_rate,total_gflops,unsaturated_fraction");
  CHECK(lines[2].rfind("0,", 0) == 0);

  cfg = write_config(dir, Json{{"pool", {{"n_hosts", 2000}}}});
  CHECK(run({"sweep", "--config", cfg.string(), "--out", (dir / "b").string(), "--check"}) == kExitOk);
  CHECK(run({"sweep", "--config", cfg.string(), "--out", (dir / "c").string()}) == kExitOk);
  CHECK(slurp(dir / "b" / "rate_curve.csv") == slurp(dir / "c" / "rate_curve.csv"));
  CHECK(run({"sweep", "--config", cfg.string(), "--out", (dir / "d").string(), "--seed", "9"}) == kExitOk);
  CHECK(slurp(dir / "b" / "rate_curve.csv") != slurp(dir / "d" / "rate_curve.csv"));

  cfg = write_config(dir, Json{{"pool", {{"n_hosts", 10}}}, {"sweep", {{"grid", {5, 1}}}}});
  CHECK(run({"sweep", "--config", cfg.string(), "--out", (dir / "e").string()}) == kExitInputError);
}

TEST_CASE("simulate command") {
  const auto dir = scratch("simulate");
  const Json sim = {{"duration_days", 60},
                    {"churn", {{"arrival_rate", 5}, {"lifetime", {{"kind", "exponential"}, {"mean_days", 10}}}}},
                    {"pool", {{"n_hosts", 0}}}};
  auto cfg = write_config(dir, Json{{"seed", 3}, {"sim", sim}});
  CHECK(run({"simulate", "--config", cfg.string(), "--out", (dir / "a").string()}) == kExitOk);
  CHECK(run({"simulate", "--config", cfg.string(), "--out", (dir / "b").string()}) == kExitOk);
  for (const char* f : {"sim_report.json", "timeline.csv", "analytic_comparison.json"}) {
    INFO(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const auto cmp = read_json(dir / "a" / "analytic_comparison.json");
  CHECK(cmp["applicable"] == false);
  const auto rep = read_json(dir / "a" / "sim_report.json");
  CHECK(rep["_provenance"]["seed"] == 3);

  cfg = write_config(dir, Json{{"sim", {{"min_quorum", 0}}}});
  CHECK(run({"simulate", "--config", cfg.string(), "--out", (dir / "c").string()}) == kExitInputError);
  cfg = write_config(dir, Json{{"sim", {{"bogus_key", 1}}}});
  CHECK(run({"simulate", "--config", cfg.string(), "--out", (dir / "c").string()}) == kExitInputError);
}

TEST_CASE("command line errors map to exit code 2") {
  const auto dir = scratch("args");
  const auto cfg = write_config(dir, Json::object());
  CHECK(run({}) == kExitInputError);
  CHECK(run({"frobnicate", "--config", cfg.string()}) == kExitInputError);
  CHECK(run({"capacity"}) == kExitInputError);
  CHECK(run({"capacity", "--config", (dir / "missing.json").string()}) == kExitInputError);
  CHECK(run({"capacity", "--config", cfg.string(), "--format", "xml"}) == kExitInputError);
  CHECK(run({"ingest", "--config", cfg.string(), "--out", (dir / "o").string()}) == kExitInputError);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(run({"capacity", "--config", (dir / "broken.json").string()}) == kExitInputError);
}

TEST_CASE("config hash tracks the effective document") {
  auto a = make_run_config(Json{{"seed", 1}});
  auto b = make_run_config(Json{{"seed", 1}});
  CHECK(a.config_hash() == b.config_hash());
  Overrides o;
  o.seed = 2;
  auto c = make_run_config(Json{{"seed", 1}}, o);
  CHECK(c.seed == 2);
  CHECK(c.config_hash() != a.config_hash());
  CHECK(a.config_hash().size() == 16);
}

TEST_CASE("generator json round trip") {
  using G = FieldGenerator;
  const std::vector<G> gens = {G::constant(2), G::uniform(1, 2), G::exponential(3), G::lognormal(4, 0.5),
                               G::beta(0.3, 5), G::discrete({1, 2}, {0.5, 0.5}),
                               G::empirical(EmpiricalDistribution({1, 5, 3}, "e"), true),
                               G::mixture({G::constant(1), G::exponential(2)}, {0.4, 0.6})};
  for (const auto& g : gens) {
    const auto j = to_json(g);
    const auto back = field_generator_from_json(j);
    CHECK(to_json(back).dump() == j.dump());
    CHECK(back.mean() == doctest::Approx(g.mean()));
  }
}
