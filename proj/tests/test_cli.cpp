#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dtnsim/gtfs.hpp"
#include "dtnsim/harness.hpp"
#include "dtnsim/metrics.hpp"
#include "json.hpp"

using namespace dtnsim;
namespace fs = std::filesystem;

namespace {

const fs::path kFeed = fs::path(DTNSIM_TEST_DATA) / "gtfs_basic";

struct Outcome {
  int rc = 0;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int rc = run_cli(args, out, err);
  return {rc, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("dtnsim_cli_" + name + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  auto s = slurp(p);
  return s.substr(0, s.find('\n'));
}

// A small world that runs in well under a second.
std::vector<std::string> small(std::vector<std::string> args) {
  for (const char* s : {"--set", "num_routes=3", "--set", "num_offroute_sensors=5", "--duration", "6h"}) {
    args.emplace_back(s);
  }
  return args;
}

}  // namespace

TEST_CASE("profile writes route profiles and statistics") {
  auto dir = scratch("profile");
  auto r = cli({"profile", "--feed", kFeed.string(), "--out", (dir / "p.csv").string()});
  CHECK(r.rc == 0);
  CHECK(r.err.find("R3") != std::string::npos);
  auto profiles = gtfs::load_profiles(dir / "p.csv");
  CHECK(profiles.size() == 2);
  CHECK(first_line(dir / "p.csv") == gtfs::kProfilesHeader);
  CHECK(first_line(dir / "feed_statistics.csv") == gtfs::kStatisticsHeader);
  CHECK(r.out.find("Number of routes") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("profile failures") {
  auto dir = scratch("profile_fail");
  auto missing = cli({"profile", "--feed", (dir / "absent").string(), "--out", (dir / "p.csv").string()});
  CHECK(missing.rc == kExitInput);
  CHECK(missing.err.find("absent") != std::string::npos);

  auto only = cli({"profile", "--feed", kFeed.string(), "--stats-only", "--out", (dir / "p.csv").string()});
  CHECK(only.rc == 0);
  CHECK(only.out.find("Number of routes") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "p.csv"));
  CHECK(cli({"profile"}).rc == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("estimate on the reference route") {
  auto base = std::vector<std::string>{"estimate", "--circumference", "15km", "--velocity", "20km/h",
                                       "--sensor", "5km", "--gateway", "10km"};
  auto text = cli(base);
  CHECK(text.rc == 0);
  CHECK(text.out.find("T_D,on      0.5000 h") != std::string::npos);
  CHECK(text.out.find("bound 2C/v  1.5000 h") != std::string::npos);

  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  auto js = cli(json_args);
  REQUIRE(js.rc == 0);
  auto doc = nlohmann::json::parse(js.out);
  CHECK(doc["t_d_on_s"].get<double>() == doctest::Approx(1800.0));
  CHECK(doc["bound_on_s"].get<double>() == doctest::Approx(5400.0));

  auto off = base;
  off.insert(off.end(), {"--e-sp", "2h", "--e-pb", "12.5h", "--format", "json"});
  auto o = cli(off);
  REQUIRE(o.rc == 0);
  auto od = nlohmann::json::parse(o.out);
  CHECK(od["t_d_off_s"].get<double>() == doctest::Approx(hours(15.0)));

  auto bad = cli({"estimate", "--circumference", "15", "--velocity", "20km/h", "--sensor", "5km", "--gateway",
                  "10km"});
  CHECK(bad.rc == kExitUsage);
  CHECK(bad.err.find("hint") != std::string::npos);
}

TEST_CASE("simulate writes per-seed outputs and a manifest") {
  auto dir = scratch("sim");
  auto r = cli(small({"simulate", "--seeds", "0..0", "--out", dir.string()}));
  REQUIRE(r.rc == 0);
  CHECK(fs::exists(dir / "seed_000" / "messages.csv"));
  CHECK_FALSE(fs::exists(dir / "aggregate"));
  CHECK(first_line(dir / "seed_000" / "messages.csv") == metrics::kMessagesHeader);
  CHECK(first_line(dir / "seed_000" / "sensor_rates.csv") == metrics::kSensorRatesHeader);
  CHECK(first_line(dir / "seed_000" / "stage_quantiles.csv") == metrics::kStageQuantilesHeader);

  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"].get<std::string>() == "simulate");
  REQUIRE(manifest["files"].size() > 0);
  for (const auto& f : manifest["files"]) CHECK(fs::exists(dir / f.get<std::string>()));
  fs::remove_all(dir);
}

TEST_CASE("simulate is reproducible across runs and job counts") {
  auto a = scratch("rep_a");
  auto b = scratch("rep_b");
  auto c = scratch("rep_c");
  REQUIRE(cli(small({"simulate", "--seeds", "0..3", "--jobs", "1", "--out", a.string()})).rc == 0);
  REQUIRE(cli(small({"simulate", "--seeds", "0..3", "--jobs", "1", "--out", b.string()})).rc == 0);
  REQUIRE(cli(small({"simulate", "--seeds", "0..3", "--jobs", "3", "--out", c.string()})).rc == 0);
  CHECK(first_line(a / "aggregate" / "sensor_rates_by_seed.csv") == metrics::kSensorRatesBySeedHeader);
  CHECK(first_line(a / "aggregate" / "delivery_histogram.csv") == metrics::kHistogramHeader);
  for (const char* f : {"seed_000/messages.csv", "seed_003/messages.csv", "aggregate/sensor_rates.csv",
                        "aggregate/sensor_rates_by_seed.csv", "aggregate/stage_quantiles.csv",
                        "aggregate/delivery_histogram.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("simulate rejects bad configs") {
  auto dir = scratch("sim_bad");
  auto r = cli({"simulate", "--set", "num_routes=-2", "--out", dir.string()});
  CHECK(r.rc == kExitUsage);
  CHECK(r.err.find("num_routes") != std::string::npos);
  auto unknown = cli({"simulate", "--set", "warp=9", "--out", dir.string()});
  CHECK(unknown.rc == kExitUsage);
  std::ofstream(dir / "bad.cfg") << "seed = 1\nnot a setting\n";
  auto file = cli({"simulate", "--config", (dir / "bad.cfg").string(), "--out", dir.string()});
  CHECK(file.rc == kExitUsage);
  CHECK(file.err.find("line 2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("simulate from GTFS profiles") {
  auto dir = scratch("sim_profiles");
  REQUIRE(cli({"profile", "--feed", kFeed.string(), "--out", (dir / "p.csv").string()}).rc == 0);
  auto r = cli({"simulate", "--profiles", (dir / "p.csv").string(), "--set", "num_offroute_sensors=2", "--duration",
                "6h", "--seed", "1", "--out", (dir / "run").string()});
  REQUIRE(r.rc == 0);
  auto summary = nlohmann::json::parse(slurp(dir / "run" / "seed_001" / "summary.json"));
  auto manifest = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
  CHECK(summary["config_hash"] == manifest["config_hash"]);
  CHECK(summary["counts"]["offroute"]["sensors"].get<int>() == 2);
  // on-route sensors sit on the two feed routes only
  auto rates = slurp(dir / "run" / "seed_001" / "sensor_rates.csv");
  CHECK(rates.find("R1") != std::string::npos);
  CHECK(rates.find("R2") != std::string::npos);
  CHECK(rates.find("R3") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sweep argument errors") {
  auto dir = scratch("sweep_bad");
  CHECK(cli(small({"sweep", "--out", dir.string()})).rc == kExitUsage);
  auto unknown = cli(small({"sweep", "--grid", "flux=1,2", "--out", dir.string()}));
  CHECK(unknown.rc == kExitUsage);
  CHECK(unknown.err.find("gateways_per_route") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("one-point sweep reproduces simulate") {
  auto dir = scratch("sweep_one");
  REQUIRE(cli(small({"sweep", "--seeds", "0..2", "--grid", "gateways_per_route=1..2", "--out",
                     (dir / "sw").string()}))
              .rc == 0);
  REQUIRE(cli(small({"simulate", "--seeds", "0..2", "--out", (dir / "sim").string()})).rc == 0);
  for (const char* f : {"sensor_rates.csv", "stage_quantiles.csv", "delivery_histogram.csv"}) {
    CAPTURE(f);
    CHECK(slurp(dir / "sw" / "point_000" / "aggregate" / f) == slurp(dir / "sim" / "aggregate" / f));
  }
  CHECK(fs::exists(dir / "sw" / "sweep.csv"));
  fs::remove_all(dir);
}

TEST_CASE("more gateways never lengthen the carry leg on average") {
  auto dir = scratch("sweep_gw");
  auto r = cli({"sweep", "--seeds", "0..4", "--set", "num_routes=8", "--set", "num_offroute_sensors=0", "--duration",
                "12h", "--grid", "gateways_per_route=1..1,2..2", "--out", dir.string()});
  REQUIRE(r.rc == 0);
  std::istringstream csv(slurp(dir / "sweep.csv"));
  std::string header, row;
  std::getline(csv, header);
  CHECK(header.rfind("point,gateways_per_route,config_hash,seeds,onroute_rate_mean", 0) == 0);
  auto column = [&](const std::string& line, const std::string& name) {
    std::vector<std::string> h, v;
    std::string cell;
    std::istringstream hs(header), vs(line);
    while (std::getline(hs, cell, ',')) h.push_back(cell);
    while (std::getline(vs, cell, ',')) v.push_back(cell);
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i] == name) return std::stod(v.at(i));
    }
    FAIL("missing column " << name);
    return 0.0;
  };
  std::vector<double> carry;
  while (std::getline(csv, row)) carry.push_back(column(row, "onroute_bus_to_gateway_mean_s"));
  REQUIRE(carry.size() == 2);
  CHECK(carry[1] <= carry[0]);
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  for (const auto& f : manifest["files"]) CHECK(fs::exists(dir / f.get<std::string>()));
  fs::remove_all(dir);
}

TEST_CASE("seed ranges") {
  CHECK(parse_seed_range("3") == std::vector<std::uint64_t>{3});
  CHECK(parse_seed_range("0..2") == std::vector<std::uint64_t>{0, 1, 2});
  CHECK_THROWS_AS(parse_seed_range("5..2"), Error);
  CHECK_THROWS_AS(parse_seed_range("x"), Error);
}

TEST_CASE("manifest refuses to list missing files") {
  auto dir = scratch("manifest");
  RunManifest m;
  m.command = "simulate";
  m.output_dir = dir;
  m.files = {"ghost.csv"};
  try {
    write_manifest(m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(exit_code_for(e) == kExitInvariant);
  }
  fs::remove_all(dir);
}
