#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/engine.hpp"

namespace dtnsim::metrics {

enum class Stage {
  kSensorToBus,         ///< t_bus_board - t_generated (on-route)
  kBusToGateway,        ///< t_delivered - t_bus_board
  kSensorToPedestrian,  ///< t_pedestrian_pickup - t_generated
  kPedestrianToBus,     ///< t_bus_board - t_pedestrian_pickup
  kTotal,               ///< t_delivered - t_generated
};

const char* to_string(Stage stage);

/// Box-plot statistics. Quantiles use linear interpolation between closest
/// ranks: for sorted x[0..n-1], q(p) = x[k] + (h - k)(x[k+1] - x[k]) with
/// h = (n - 1)p and k = floor(h).
struct Quantiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t n = 0;

  bool operator==(const Quantiles&) const = default;
};

double quantile_sorted(std::span<const double> sorted, double p);

/// Empty input yields nullopt, the explicit "no samples" marker.
std::optional<Quantiles> summarize(std::vector<double> samples);

struct StageSamples {
  std::vector<double> values;
  std::optional<Quantiles> quantiles;
};

/// Delays for one stage over delivered messages that carry both stamps.
/// `kind` restricts to one sensor class.
StageSamples stage_delays(const SimulationResult& result, Stage stage,
                          std::optional<SensorKind> kind = std::nullopt);

/// delivered / generated for one sensor; nullopt when it generated nothing.
/// Throws kLookup for unknown ids.
std::optional<double> delivery_rate(std::string_view sensor_id, const SimulationResult& result);

struct SeedRate {
  std::uint64_t seed = 0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::optional<double> rate;

  bool operator==(const SeedRate&) const = default;
};

struct SensorRate {
  std::string sensor_id;
  SensorKind kind = SensorKind::kOnRoute;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  /// Mean of per-seed rates that have data.
  std::optional<double> rate;
  std::vector<SeedRate> per_seed;

  bool operator==(const SensorRate&) const = default;
};

struct StageSeries {
  std::string name;  ///< e.g. "onroute.sensor_to_bus"
  Stage stage = Stage::kTotal;
  SensorKind kind = SensorKind::kOnRoute;
  std::vector<double> samples;
  std::optional<Quantiles> quantiles;

  bool operator==(const StageSeries&) const = default;
};

struct Histogram {
  SensorKind kind = SensorKind::kOnRoute;
  std::vector<std::uint64_t> counts;  ///< equal-width bins over [0, 1]; 1.0 lands in the last

  std::uint64_t total() const;
  bool operator==(const Histogram&) const = default;
};

struct RunMetadata {
  std::vector<std::uint64_t> seeds;
  double horizon_s = 0.0;
  std::string config_hash;

  bool operator==(const RunMetadata&) const = default;
};

struct MetricsReport {
  RunMetadata metadata;
  std::vector<SensorRate> sensors;
  std::vector<StageSeries> stages;
  std::vector<Histogram> histograms;  ///< on-route, then off-route

  const StageSeries& series(std::string_view name) const;
  const SensorRate& sensor(std::string_view sensor_id) const;
  /// Every (seed, sensor) rate with data, for one sensor class.
  std::vector<double> seed_rates(SensorKind kind) const;

  bool operator==(const MetricsReport&) const = default;
};

inline constexpr int kDefaultHistogramBins = 20;

Histogram histogram(SensorKind kind, std::span<const double> rates, int bins);

MetricsReport build_report(const SimulationResult& result, int histogram_bins = kDefaultHistogramBins);

/// Pools samples and per-seed rates. Throws kAggregation on mixed config hashes
/// or histogram layouts, or on an empty list.
MetricsReport aggregate_runs(std::span<const MetricsReport> reports);

// ---------------------------------------------------------------------------
// Exports. Column order is fixed; times are seconds with 6 decimals, rates
// have 6 decimals, "NA" marks a sensor without data, blank marks a missing
// timestamp.

inline constexpr std::string_view kMessagesHeader =
    "message_id,sensor_id,kind,t_generated_s,t_pedestrian_pickup_s,t_bus_board_s,t_delivered_s,path";
inline constexpr std::string_view kSensorRatesHeader = "sensor_id,kind,generated,delivered,rate";
inline constexpr std::string_view kSensorRatesBySeedHeader = "seed,sensor_id,kind,generated,delivered,rate";
inline constexpr std::string_view kStageQuantilesHeader = "stage,min,q1,median,q3,max,mean,n";
inline constexpr std::string_view kHistogramHeader = "kind,bin_lo,bin_hi,count";

void write_messages_csv(std::ostream& out, const SimulationResult& result);
void write_sensor_rates_csv(std::ostream& out, const MetricsReport& report);
void write_sensor_rates_by_seed_csv(std::ostream& out, const MetricsReport& report);
void write_stage_quantiles_csv(std::ostream& out, const MetricsReport& report);
void write_histogram_csv(std::ostream& out, const MetricsReport& report);

/// Run metadata, counts and stage quantiles as pretty-printed JSON.
std::string summary_json(const MetricsReport& report, std::string_view tool_version);

}  // namespace dtnsim::metrics
