#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/geometry.hpp"
#include "dtnsim/rng.hpp"
#include "dtnsim/route_profile.hpp"
#include "dtnsim/units.hpp"

namespace dtnsim {

/// A positive delay distribution, in seconds.
struct DelayDistribution {
  enum class Kind { kConstant, kLognormal, kExponential, kUniform };

  Kind kind = Kind::kConstant;
  double a = 0.0;  ///< constant value, lognormal median, exponential mean, uniform low
  double b = 0.0;  ///< lognormal log-sigma, uniform high

  static DelayDistribution constant(double seconds) { return {Kind::kConstant, seconds, 0.0}; }
  static DelayDistribution lognormal(double median_s, double log_sigma) {
    return {Kind::kLognormal, median_s, log_sigma};
  }
  static DelayDistribution exponential(double mean_s) { return {Kind::kExponential, mean_s, 0.0}; }
  static DelayDistribution uniform(double lo_s, double hi_s) { return {Kind::kUniform, lo_s, hi_s}; }

  double sample(RandomStream& rng) const;
  double median() const;

  /// "lognormal(median=32h, sigma=1.2)", "constant(1h)", "exponential(mean=12h)",
  /// "uniform(1h..3h)".
  static DelayDistribution parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const DelayDistribution&) const = default;
};

/// Experiment description. Defaults reproduce the 48-hour, 32-route
/// reference experiment.
struct ScenarioConfig {
  std::uint64_t seed = 0;
  double duration_s = hours(48.0);
  int num_routes = 32;
  IntRange onroute_sensors_per_route{2, 8};
  IntRange gateways_per_route{1, 2};
  IntRange buses_per_route{1, 2};
  double stops_mean = 72.6;
  double stops_variance = 52.44;
  int stops_min = 2;
  RealRange bus_velocity_kmh{17.47, 21.47};
  RealRange generation_period_s{minutes(10.0), hours(2.0)};
  int num_offroute_sensors = 100;
  double circumference_mean_km = 15.0;
  double circumference_spread_km = 7.0;
  double pedestrian_arrival_mean_s = hours(2.0);
  double pedestrian_arrival_spread_s = minutes(30.0);
  /// When true, the two unit-bearing spreads above are variances (in km^2 and
  /// min^2) rather than standard deviations.
  bool spread_is_variance = false;
  DelayDistribution pedestrian_to_bus = DelayDistribution::lognormal(hours(32.0), 1.2);
  /// Unset means max(gateways per route) / mean stops per route.
  std::optional<double> p_pedestrian_gateway;

  double stops_sigma() const;
  double circumference_sigma_km() const;
  double pedestrian_arrival_sigma_s() const;
  double effective_p_pedestrian_gateway() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError naming the offending field.
void validate_config(const ScenarioConfig& config);

enum class SensorKind { kOnRoute, kOffRoute };

const char* to_string(SensorKind kind);

struct SensorSpec {
  std::string sensor_id;
  SensorKind kind = SensorKind::kOnRoute;
  std::string route_id;   ///< on-route only
  ArcPosition position;   ///< on-route only
  double generation_period_s = 0.0;
  double generation_phase_s = 0.0;
  double pedestrian_arrival_mean_s = 0.0;  ///< off-route only
  double pedestrian_arrival_sd_s = 0.0;    ///< off-route only

  bool operator==(const SensorSpec&) const = default;
};

struct PedestrianModel {
  DelayDistribution to_bus;
  double p_gateway = 0.0;

  bool operator==(const PedestrianModel&) const = default;
};

struct ScenarioSummary {
  int route_count = 0;
  int bus_count = 0;
  int stop_count = 0;
  int gateway_count = 0;
  int onroute_sensor_count = 0;
  int offroute_sensor_count = 0;

  bool operator==(const ScenarioSummary&) const = default;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<RouteCircle> routes;
  std::vector<BusState> buses;
  std::vector<SensorSpec> onroute_sensors;
  std::vector<SensorSpec> offroute_sensors;
  PedestrianModel pedestrians;

  ScenarioSummary summary() const;
  const RouteCircle& route(std::string_view route_id) const;

  bool operator==(const Scenario&) const = default;
};

/// Samples a full world from the config's ranges. Deterministic in (seed, config).
Scenario build_scenario(const ScenarioConfig& config);

/// Route geometry, stop counts and bus counts come from `profiles`; sensors,
/// gateways and velocities are still sampled from `config`.
Scenario from_route_profiles(std::span<const RouteProfile> profiles, const ScenarioConfig& config);

/// Checks referential integrity and per-route invariants. Throws Error.
void validate_scenario(const Scenario& scenario);

/// Canonical JSON rendering; identical scenarios render to identical bytes.
std::string scenario_to_json(const Scenario& scenario);

}  // namespace dtnsim
