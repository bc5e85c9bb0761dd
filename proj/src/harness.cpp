#include "dtnsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dtnsim/analytic.hpp"
#include "dtnsim/config.hpp"
#include "dtnsim/csv.hpp"
#include "dtnsim/error.hpp"
#include "dtnsim/gtfs.hpp"
#include "dtnsim/units.hpp"
#include "json.hpp"

namespace dtnsim {

namespace fs = std::filesystem;

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::kFeedFormat:
    case ErrorCode::kLookup:
    case ErrorCode::kStatistics:
    case ErrorCode::kIo:
      return kExitInput;
    case ErrorCode::kInvariant:
    case ErrorCode::kAggregation:
      return kExitInvariant;
    default:
      return kExitUsage;
  }
}

std::vector<std::uint64_t> parse_seed_range(std::string_view text) {
  auto r = parse_int_range(text);
  if (r.lo < 0) throw ConfigError("seeds", "seeds must be non-negative");
  std::vector<std::uint64_t> seeds;
  for (long long s = r.lo; s <= r.hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  return seeds;
}

std::vector<SeedRun> run_batch(const BatchOptions& options, const std::function<void(const SeedRun&)>& on_done) {
  validate_config(options.config);
  std::vector<SeedRun> runs(options.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        ScenarioConfig config = options.config;
        config.seed = options.seeds[i];
        Scenario scenario = options.profiles ? from_route_profiles(*options.profiles, config) : build_scenario(config);
        SeedRun run;
        run.seed = config.seed;
        run.result = dtnsim::run(scenario, config.duration_s);
        run.report = metrics::build_report(run.result, options.histogram_bins);
        std::lock_guard lock(mu);
        if (on_done) on_done(run);
        if (!options.keep_results) run.result = SimulationResult{};
        runs[i] = std::move(run);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(runs.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return runs;
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

namespace {

template <typename Fn>
fs::path write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  write_text_file(path, buf.str());
  return path;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string seed_dir_name(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seed_%03llu", static_cast<unsigned long long>(seed));
  return buf;
}

std::string point_dir_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%03zu", index);
  return buf;
}

fs::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "dtnsim_out";
}

}  // namespace

std::vector<fs::path> write_seed_outputs(const fs::path& dir, const SeedRun& run) {
  return {
      write_with(dir / "messages.csv", [&](std::ostream& o) { metrics::write_messages_csv(o, run.result); }),
      write_with(dir / "sensor_rates.csv", [&](std::ostream& o) { metrics::write_sensor_rates_csv(o, run.report); }),
      write_with(dir / "stage_quantiles.csv",
                 [&](std::ostream& o) { metrics::write_stage_quantiles_csv(o, run.report); }),
      write_with(dir / "summary.json", [&](std::ostream& o) { o << metrics::summary_json(run.report, kToolVersion); }),
  };
}

std::vector<fs::path> write_aggregate_outputs(const fs::path& dir, const metrics::MetricsReport& aggregate) {
  return {
      write_with(dir / "sensor_rates.csv", [&](std::ostream& o) { metrics::write_sensor_rates_csv(o, aggregate); }),
      write_with(dir / "sensor_rates_by_seed.csv",
                 [&](std::ostream& o) { metrics::write_sensor_rates_by_seed_csv(o, aggregate); }),
      write_with(dir / "stage_quantiles.csv",
                 [&](std::ostream& o) { metrics::write_stage_quantiles_csv(o, aggregate); }),
      write_with(dir / "delivery_histogram.csv",
                 [&](std::ostream& o) { metrics::write_histogram_csv(o, aggregate); }),
      write_with(dir / "summary.json", [&](std::ostream& o) { o << metrics::summary_json(aggregate, kToolVersion); }),
  };
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["seeds"] = m.seeds;
  j["output_dir"] = m.output_dir.string();
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["tool_version"] = m.tool_version;
  auto files = nlohmann::ordered_json::array();
  for (const auto& f : m.files) files.push_back(f.generic_string());
  j["files"] = files;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m) {
  for (const auto& f : m.files) {
    if (!fs::exists(m.output_dir / f)) {
      throw Error(ErrorCode::kInvariant, "manifest names missing file " + (m.output_dir / f).string());
    }
  }
  const fs::path final_path = m.output_dir / "manifest.json";
  const fs::path tmp = m.output_dir / "manifest.json.tmp";
  write_text_file(tmp, manifest_json(m));
  std::error_code ec;
  fs::rename(tmp, final_path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move manifest into place: " + ec.message());
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// ---------------------------------------------------------------------------
// profile

struct ProfileArgs {
  std::string feed;
  std::string out;
  std::string stats_csv;
  bool stats_only = false;
};

int cmd_profile(const ProfileArgs& a, Context& ctx) {
  auto parsed = gtfs::parse_feed(a.feed);
  for (const auto& w : parsed.warnings) ctx.err << "warning: route " << w.route_id << ": " << w.message << '\n';
  auto stats = gtfs::feed_statistics(parsed.profiles);
  ctx.out << gtfs::format_statistics_table(stats);
  if (a.stats_only) return kExitOk;

  fs::path profiles_path = a.out.empty() ? default_output_dir() / "route_profiles.csv" : fs::path(a.out);
  fs::path stats_path = a.stats_csv.empty() ? profiles_path.parent_path() / "feed_statistics.csv" : fs::path(a.stats_csv);
  write_with(profiles_path, [&](std::ostream& o) { gtfs::write_profiles_csv(o, parsed.profiles); });
  write_with(stats_path, [&](std::ostream& o) { gtfs::write_statistics_csv(o, stats); });
  ctx.out << "wrote " << profiles_path.string() << " (" << parsed.profiles.size() << " routes)\n"
          << "wrote " << stats_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string circumference;
  std::string velocity;
  std::vector<std::string> buses{"0km"};
  std::string sensor;
  std::vector<std::string> gateways;
  std::string time = "0s";
  std::string e_sp;
  std::string e_pb;
  std::string max_sp;
  std::string max_pb;
  std::string format = "text";
};

std::string hours_text(double s) { return format_fixed(to_hours(s), 4) + " h (" + format_fixed(s, 3) + " s)"; }

int cmd_estimate(const EstimateArgs& a, Context& ctx) {
  RouteCircle route;
  route.route_id = "estimate";
  route.circumference_km = parse_length(a.circumference);
  const double v = parse_speed(a.velocity);
  if (!(v > 0.0)) throw Error(ErrorCode::kInvalidParameter, "velocity must be positive");
  std::vector<BusState> buses;
  for (std::size_t i = 0; i < a.buses.size(); ++i) {
    buses.push_back({"bus" + std::to_string(i), route.route_id, {parse_length(a.buses[i])}, v});
  }
  for (const auto& g : a.gateways) route.gateway_positions.push_back({parse_length(g)});
  route.stops = route.gateway_positions;
  validate_route(route);
  const ArcPosition sensor{parse_length(a.sensor)};
  const double t = parse_duration(a.time);

  auto on = analytic::t_d_on(route, buses, sensor, t);
  const double bound_on = analytic::max_t_d_on(route, buses.front());
  const bool off = !a.e_sp.empty() || !a.e_pb.empty();
  std::optional<analytic::OffRouteLatencyBreakdown> off_route;
  std::optional<double> bound_off;
  if (off) {
    const double e_sp = a.e_sp.empty() ? 0.0 : parse_duration(a.e_sp);
    const double e_pb = a.e_pb.empty() ? 0.0 : parse_duration(a.e_pb);
    off_route = analytic::OffRouteLatencyBreakdown{e_sp, e_pb, on.t_sb, on.t_bg, e_sp + e_pb + on.t_d_on};
    if (off_route->e_t_sp < 0.0 || off_route->e_t_pb < 0.0) {
      throw Error(ErrorCode::kInvalidParameter, "expected pedestrian delays must be non-negative");
    }
    if (!a.max_sp.empty() || !a.max_pb.empty()) {
      bound_off = analytic::max_t_d_off(a.max_sp.empty() ? 0.0 : parse_duration(a.max_sp),
                                        a.max_pb.empty() ? 0.0 : parse_duration(a.max_pb), route, buses.front());
    }
  }

  if (a.format == "json") {
    nlohmann::ordered_json j;
    j["circumference_km"] = route.circumference_km;
    j["velocity_kmh"] = v;
    j["t_s"] = t;
    j["t_sb_s"] = on.t_sb;
    j["t_bg_s"] = on.t_bg;
    j["t_d_on_s"] = on.t_d_on;
    j["bound_on_s"] = bound_on;
    if (off_route) {
      j["e_t_sp_s"] = off_route->e_t_sp;
      j["e_t_pb_s"] = off_route->e_t_pb;
      j["t_d_off_s"] = off_route->t_d_off;
      if (bound_off) j["bound_off_s"] = *bound_off;
    }
    ctx.out << j.dump(2) << '\n';
    return kExitOk;
  }
  ctx.out << "T_SB        " << hours_text(on.t_sb) << '\n'
          << "T_BG        " << hours_text(on.t_bg) << '\n'
          << "T_D,on      " << hours_text(on.t_d_on) << '\n'
          << "bound 2C/v  " << hours_text(bound_on) << '\n';
  if (off_route) {
    ctx.out << "E[T_SP]     " << hours_text(off_route->e_t_sp) << '\n'
            << "E[T_PB]     " << hours_text(off_route->e_t_pb) << '\n'
            << "T_D,off     " << hours_text(off_route->t_d_off) << '\n';
    if (bound_off) ctx.out << "bound off   " << hours_text(*bound_off) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate / sweep

struct SimulateArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string duration;
  std::string out;
  std::string profiles;
  unsigned jobs = 1;
  int bins = metrics::kDefaultHistogramBins;
};

void apply_assignment(ScenarioConfig& config, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(assignment, "expected key=value");
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    return s;
  };
  apply_setting(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

struct Prepared {
  BatchOptions batch;
  fs::path out_dir;
};

Prepared prepare(const SimulateArgs& a) {
  Prepared p;
  ScenarioConfig config = a.config.empty() ? ScenarioConfig{} : load_config_file(a.config);
  for (const auto& s : a.sets) apply_assignment(config, s);
  if (!a.duration.empty()) config.duration_s = parse_duration(a.duration);
  if (a.seed && !a.seeds.empty()) throw ConfigError("seeds", "give --seed or --seeds, not both");
  if (a.seed) {
    p.batch.seeds = {*a.seed};
  } else if (!a.seeds.empty()) {
    p.batch.seeds = parse_seed_range(a.seeds);
  } else {
    p.batch.seeds = {config.seed};
  }
  validate_config(config);
  if (a.bins < 1) throw ConfigError("bins", "need at least one histogram bin");
  if (!a.profiles.empty()) p.batch.profiles = gtfs::load_profiles(a.profiles);
  p.batch.config = config;
  p.batch.jobs = std::max(1u, a.jobs);
  p.batch.histogram_bins = a.bins;
  p.out_dir = a.out.empty() ? default_output_dir() : fs::path(a.out);
  return p;
}

// Runs the batch, writing per-seed outputs under `dir` (relative names go into
// `files`). Returns the aggregate report.
metrics::MetricsReport run_and_write(const BatchOptions& batch, const fs::path& root, const fs::path& rel,
                                     bool per_seed, bool force_aggregate, std::vector<fs::path>& files) {
  std::vector<metrics::MetricsReport> reports(batch.seeds.size());
  std::map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < batch.seeds.size(); ++i) index[batch.seeds[i]] = i;
  std::vector<std::vector<fs::path>> seed_files(batch.seeds.size());

  auto on_done = [&](const SeedRun& run) {
    const std::size_t i = index.at(run.seed);
    if (per_seed) {
      for (auto& f : write_seed_outputs(root / rel / seed_dir_name(run.seed), run)) {
        seed_files[i].push_back(fs::relative(f, root));
      }
    }
    reports[i] = run.report;
  };
  BatchOptions lean = batch;
  lean.keep_results = false;
  run_batch(lean, on_done);
  for (auto& sf : seed_files) files.insert(files.end(), sf.begin(), sf.end());

  auto aggregate = metrics::aggregate_runs(reports);
  if (reports.size() > 1 || force_aggregate) {
    for (auto& f : write_aggregate_outputs(root / rel / "aggregate", aggregate)) files.push_back(fs::relative(f, root));
  }
  return aggregate;
}

int cmd_simulate(const SimulateArgs& a, Context& ctx) {
  auto p = prepare(a);
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.started_at = utc_now();
  manifest.config_hash = config_hash(p.batch.config);
  manifest.seeds = p.batch.seeds;
  manifest.output_dir = p.out_dir;
  fs::create_directories(p.out_dir);

  auto aggregate = run_and_write(p.batch, p.out_dir, "", true, false, manifest.files);
  manifest.config_hash = aggregate.metadata.config_hash;
  manifest.finished_at = utc_now();
  write_manifest(manifest);

  auto onroute = aggregate.seed_rates(SensorKind::kOnRoute);
  auto offroute = aggregate.seed_rates(SensorKind::kOffRoute);
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  ctx.out << "seeds " << p.batch.seeds.size() << "  config " << manifest.config_hash << '\n'
          << "mean on-route delivery rate  " << format_fixed(mean(onroute), 4) << '\n'
          << "mean off-route delivery rate " << format_fixed(mean(offroute), 4) << '\n'
          << "outputs in " << p.out_dir.string() << '\n';
  return kExitOk;
}

struct SweepArgs {
  SimulateArgs base;
  std::vector<std::string> grid;
};

// Splits on commas that are not inside parentheses.
std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double median_or_nan(const metrics::MetricsReport& r, std::string_view name) {
  const auto& s = r.series(name);
  return s.quantiles ? s.quantiles->median : std::nan("");
}

std::string num_or_na(double x) { return std::isnan(x) ? "NA" : format_fixed(x, 6); }

int cmd_sweep(const SweepArgs& a, Context& ctx) {
  if (a.grid.empty()) throw ConfigError("grid", "empty grid; give at least one --grid key=v1,v2");
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  const auto keys = config_keys();
  for (const auto& g : a.grid) {
    auto eq = g.find('=');
    if (eq == std::string::npos) throw ConfigError("grid", "expected key=v1,v2 in '" + g + "'");
    std::string key = g.substr(0, eq);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      std::string list;
      for (const auto& k : keys) list += (list.empty() ? "" : ", ") + k;
      throw ConfigError(key, "unknown field; valid fields are: " + list);
    }
    auto values = split_values(g.substr(eq + 1));
    for (const auto& v : values) {
      if (v.empty()) throw ConfigError(key, "empty value in grid");
    }
    axes.emplace_back(key, values);
  }

  auto p = prepare(a.base);
  // Expand the cartesian product, last axis fastest.
  std::vector<std::vector<std::string>> points{{}};
  for (const auto& [key, values] : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : points) {
      for (const auto& v : values) {
        auto row = prefix;
        row.push_back(v);
        next.push_back(std::move(row));
      }
    }
    points = std::move(next);
  }
  // Every point must validate before anything runs.
  std::vector<ScenarioConfig> configs;
  for (const auto& point : points) {
    ScenarioConfig c = p.batch.config;
    for (std::size_t k = 0; k < axes.size(); ++k) apply_setting(c, axes[k].first, point[k]);
    validate_config(c);
    configs.push_back(c);
  }

  RunManifest manifest;
  manifest.command = "sweep";
  manifest.started_at = utc_now();
  manifest.config_hash = config_hash(p.batch.config);
  manifest.seeds = p.batch.seeds;
  manifest.output_dir = p.out_dir;
  fs::create_directories(p.out_dir);

  std::ostringstream table;
  table << "point";
  for (const auto& [key, values] : axes) table << ',' << key;
  table << ",config_hash,seeds,onroute_rate_mean,offroute_rate_mean,onroute_sensor_to_bus_median_s,"
           "onroute_bus_to_gateway_median_s,onroute_bus_to_gateway_mean_s,onroute_total_median_s,"
           "offroute_sensor_to_pedestrian_median_s,offroute_pedestrian_to_bus_median_s,offroute_total_median_s\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    BatchOptions batch = p.batch;
    batch.config = configs[i];
    auto agg = run_and_write(batch, p.out_dir, point_dir_name(i), false, true, manifest.files);
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
    };
    const auto& bg = agg.series("onroute.bus_to_gateway");
    table << i;
    for (const auto& v : points[i]) table << ',' << csv::escape(v);
    table << ',' << agg.metadata.config_hash << ',' << p.batch.seeds.size() << ','
          << num_or_na(mean(agg.seed_rates(SensorKind::kOnRoute))) << ','
          << num_or_na(mean(agg.seed_rates(SensorKind::kOffRoute))) << ','
          << num_or_na(median_or_nan(agg, "onroute.sensor_to_bus")) << ','
          << num_or_na(median_or_nan(agg, "onroute.bus_to_gateway")) << ','
          << num_or_na(bg.quantiles ? bg.quantiles->mean : std::nan("")) << ','
          << num_or_na(median_or_nan(agg, "onroute.total")) << ','
          << num_or_na(median_or_nan(agg, "offroute.sensor_to_pedestrian")) << ','
          << num_or_na(median_or_nan(agg, "offroute.pedestrian_to_bus")) << ','
          << num_or_na(median_or_nan(agg, "offroute.total")) << '\n';
    ctx.out << "point " << i << " done\n";
  }
  write_text_file(p.out_dir / "sweep.csv", table.str());
  manifest.files.push_back("sweep.csv");
  manifest.finished_at = utc_now();
  write_manifest(manifest);
  ctx.out << "wrote " << (p.out_dir / "sweep.csv").string() << " (" << points.size() << " points)\n";
  return kExitOk;
}

void add_simulate_options(CLI::App* cmd, SimulateArgs& a) {
  cmd->add_option("--config", a.config, "Scenario config file (key = value lines)");
  cmd->add_option("--set", a.sets, "Override one config field, key=value (repeatable)");
  cmd->add_option("--seed", a.seed, "Single seed");
  cmd->add_option("--seeds", a.seeds, "Inclusive seed range A..B");
  cmd->add_option("--duration", a.duration, "Simulated horizon, e.g. 48h");
  cmd->add_option("--out", a.out, std::string("Output directory (default $") + kOutputDirEnv + " or ./dtnsim_out)");
  cmd->add_option("--profiles", a.profiles, "Route profile CSV from `profile`, replacing sampled routes");
  cmd->add_option("--jobs", a.jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);
  cmd->add_option("--bins", a.bins, "Delivery-rate histogram bins");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-mule DTN simulator for bus and pedestrian carried sensor data", "dtnsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ProfileArgs profile;
  auto* profile_cmd = app.add_subcommand("profile", "Reduce a GTFS feed to per-route profiles and statistics");
  profile_cmd->add_option("--feed", profile.feed, "GTFS directory or .zip")->required();
  profile_cmd->add_option("--out", profile.out, "Route profile CSV to write");
  profile_cmd->add_option("--stats-csv", profile.stats_csv, "Statistics CSV to write");
  profile_cmd->add_flag("--stats-only", profile.stats_only, "Print the statistics table, write nothing");

  EstimateArgs estimate;
  auto* estimate_cmd = app.add_subcommand("estimate", "Closed-form delivery latency on one route");
  estimate_cmd->add_option("--circumference", estimate.circumference, "Route loop length, e.g. 15km")->required();
  estimate_cmd->add_option("--velocity", estimate.velocity, "Bus speed, e.g. 20km/h")->required();
  estimate_cmd->add_option("--bus", estimate.buses, "Bus position at t=0 (repeatable)");
  estimate_cmd->add_option("--sensor", estimate.sensor, "Sensor or boarding position")->required();
  estimate_cmd->add_option("--gateway", estimate.gateways, "Gateway position (repeatable)")->required();
  estimate_cmd->add_option("--time", estimate.time, "Generation time");
  estimate_cmd->add_option("--e-sp", estimate.e_sp, "Expected sensor-to-pedestrian wait (off-route)");
  estimate_cmd->add_option("--e-pb", estimate.e_pb, "Expected pedestrian-to-bus delay (off-route)");
  estimate_cmd->add_option("--max-sp", estimate.max_sp, "Bound on the sensor-to-pedestrian wait");
  estimate_cmd->add_option("--max-pb", estimate.max_pb, "Bound on the pedestrian-to-bus delay");
  estimate_cmd->add_option("--format", estimate.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run seeded simulations and export metrics");
  add_simulate_options(simulate_cmd, simulate);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the simulation over a grid of config values");
  add_simulate_options(sweep_cmd, sweep.base);
  sweep_cmd->add_option("--grid", sweep.grid, "key=v1,v2 (repeatable; cartesian product)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{out, err};
  try {
    if (*profile_cmd) return cmd_profile(profile, ctx);
    if (*estimate_cmd) return cmd_estimate(estimate, ctx);
    if (*simulate_cmd) return cmd_simulate(simulate, ctx);
    if (*sweep_cmd) return cmd_sweep(sweep, ctx);
  } catch (const Error& e) {
    err << "dtnsim: error: " << e.what() << '\n';
    if (e.code() == ErrorCode::kInvalidParameter && *estimate_cmd) {
      err << "hint: positions and lengths need units (5km, 750m), speeds km/h or m/s, times s/min/h\n";
    }
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "dtnsim: error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "dtnsim: internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace dtnsim
