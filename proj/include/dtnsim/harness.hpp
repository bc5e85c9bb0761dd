#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dtnsim/engine.hpp"
#include "dtnsim/error.hpp"
#include "dtnsim/metrics.hpp"
#include "dtnsim/route_profile.hpp"
#include "dtnsim/scenario.hpp"

namespace dtnsim {

inline constexpr const char* kToolVersion = "0.1.0";

/// Env var naming the default output directory.
inline constexpr const char* kOutputDirEnv = "DTNSIM_OUT";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitInvariant = 3,
};

int exit_code_for(const Error& error);

/// "A..B" inclusive, or a single seed.
std::vector<std::uint64_t> parse_seed_range(std::string_view text);

struct SeedRun {
  std::uint64_t seed = 0;
  SimulationResult result;
  metrics::MetricsReport report;
};

struct BatchOptions {
  ScenarioConfig config;  ///< seed field is overridden per run
  std::vector<std::uint64_t> seeds;
  unsigned jobs = 1;
  int histogram_bins = metrics::kDefaultHistogramBins;
  std::optional<std::vector<RouteProfile>> profiles;
  /// When false the returned runs carry reports only.
  bool keep_results = true;
};

/// Runs every seed, up to `jobs` at a time. `on_done` is called from worker
/// threads (serialised) as each run completes. The returned vector is in seed
/// order whatever the completion order.
std::vector<SeedRun> run_batch(const BatchOptions& options,
                               const std::function<void(const SeedRun&)>& on_done = {});

/// Writes messages.csv, sensor_rates.csv, stage_quantiles.csv, summary.json.
/// Returns the paths written.
std::vector<std::filesystem::path> write_seed_outputs(const std::filesystem::path& dir, const SeedRun& run);

/// Writes sensor_rates.csv, sensor_rates_by_seed.csv, stage_quantiles.csv,
/// delivery_histogram.csv, summary.json.
std::vector<std::filesystem::path> write_aggregate_outputs(const std::filesystem::path& dir,
                                                           const metrics::MetricsReport& aggregate);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  std::string started_at;
  std::string finished_at;
  std::string tool_version = kToolVersion;
  std::vector<std::filesystem::path> files;  ///< relative to output_dir
};

std::string manifest_json(const RunManifest& manifest);

/// Writes manifest.json via a temporary file and rename. Throws kInvariant if
/// a listed file does not exist.
void write_manifest(const RunManifest& manifest);

/// Writes `content` to `path`, creating parent directories. Throws kIo.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Entry point. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace dtnsim
