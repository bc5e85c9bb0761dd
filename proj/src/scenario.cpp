#include "dtnsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "dtnsim/config.hpp"
#include "dtnsim/error.hpp"
#include "json.hpp"

namespace dtnsim {

// ---------------------------------------------------------------------------
// DelayDistribution

double DelayDistribution::sample(RandomStream& rng) const {
  switch (kind) {
    case Kind::kConstant: return a;
    case Kind::kLognormal: return rng.lognormal(std::log(a), b);
    case Kind::kExponential: return -a * std::log(1.0 - rng.uniform01());
    case Kind::kUniform: return rng.uniform(a, b);
  }
  return a;
}

double DelayDistribution::median() const {
  switch (kind) {
    case Kind::kConstant: return a;
    case Kind::kLognormal: return a;
    case Kind::kExponential: return a * std::log(2.0);
    case Kind::kUniform: return 0.5 * (a + b);
  }
  return a;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits "name=value" argument lists; bare positional values get key "".
std::map<std::string, std::string, std::less<>> parse_args(std::string_view args) {
  std::map<std::string, std::string, std::less<>> out;
  std::size_t start = 0;
  while (start <= args.size()) {
    auto comma = args.find(',', start);
    auto item = trim(args.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) {
      auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        out.emplace("", std::string(item));
      } else {
        out.emplace(std::string(trim(item.substr(0, eq))), std::string(trim(item.substr(eq + 1))));
      }
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

const std::string& need(const std::map<std::string, std::string, std::less<>>& args, std::string_view name,
                        std::string_view text) {
  auto it = args.find(name);
  if (it == args.end()) it = args.find("");
  if (it == args.end()) {
    throw Error(ErrorCode::kInvalidParameter,
                "distribution '" + std::string(text) + "' is missing '" + std::string(name) + "'");
  }
  return it->second;
}

}  // namespace

DelayDistribution DelayDistribution::parse(std::string_view text) {
  auto t = trim(text);
  auto open = t.find('(');
  if (open == std::string_view::npos || t.back() != ')') {
    // A bare duration is a constant.
    return constant(parse_duration(t));
  }
  auto name = trim(t.substr(0, open));
  auto args = parse_args(t.substr(open + 1, t.size() - open - 2));
  DelayDistribution d;
  if (name == "constant") {
    d = constant(parse_duration(need(args, "value", t)));
  } else if (name == "lognormal") {
    d = lognormal(parse_duration(need(args, "median", t)), parse_number(need(args, "sigma", t)));
  } else if (name == "exponential") {
    d = exponential(parse_duration(need(args, "mean", t)));
  } else if (name == "uniform") {
    auto r = parse_range(need(args, "range", t), Quantity::kDuration);
    d = uniform(r.lo, r.hi);
  } else {
    throw Error(ErrorCode::kInvalidParameter,
                "unknown distribution '" + std::string(name) + "' (constant, lognormal, exponential, uniform)");
  }
  if (d.a < 0.0 || d.b < 0.0 || (d.kind != Kind::kConstant && d.kind != Kind::kUniform && d.a <= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "distribution parameters must be positive: " + std::string(t));
  }
  return d;
}

std::string DelayDistribution::to_string() const {
  switch (kind) {
    case Kind::kConstant: return "constant(" + format_duration(a) + ")";
    case Kind::kLognormal: return "lognormal(median=" + format_duration(a) + ", sigma=" + format_number(b) + ")";
    case Kind::kExponential: return "exponential(mean=" + format_duration(a) + ")";
    case Kind::kUniform: return "uniform(" + format_duration(a) + ".." + format_duration(b) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// ScenarioConfig

double ScenarioConfig::stops_sigma() const { return std::sqrt(stops_variance); }

double ScenarioConfig::circumference_sigma_km() const {
  return spread_is_variance ? std::sqrt(circumference_spread_km) : circumference_spread_km;
}

double ScenarioConfig::pedestrian_arrival_sigma_s() const {
  if (!spread_is_variance) return pedestrian_arrival_spread_s;
  return minutes(std::sqrt(to_minutes(pedestrian_arrival_spread_s)));
}

double ScenarioConfig::effective_p_pedestrian_gateway() const {
  if (p_pedestrian_gateway) return *p_pedestrian_gateway;
  return std::min(1.0, static_cast<double>(gateways_per_route.hi) / stops_mean);
}

void validate_config(const ScenarioConfig& c) {
  auto need_range = [](const IntRange& r, long long min_lo, const char* field) {
    if (r.lo < min_lo || r.lo > r.hi) {
      throw ConfigError(field, "range must satisfy " + std::to_string(min_lo) + " <= lo <= hi");
    }
  };
  if (!(c.duration_s >= 0.0)) throw ConfigError("duration", "must be >= 0");
  if (c.num_routes < 1) throw ConfigError("num_routes", "at least one route is required");
  need_range(c.onroute_sensors_per_route, 0, "onroute_sensors_per_route");
  need_range(c.gateways_per_route, 1, "gateways_per_route");
  need_range(c.buses_per_route, 1, "buses_per_route");
  if (c.stops_min < 2) throw ConfigError("stops_min", "must be >= 2");
  if (!(c.stops_mean > 0.0)) throw ConfigError("stops_mean", "must be positive");
  if (!(c.stops_variance >= 0.0)) throw ConfigError("stops_variance", "must be >= 0");
  if (c.gateways_per_route.hi > c.stops_min) {
    throw ConfigError("gateways_per_route", "max " + std::to_string(c.gateways_per_route.hi) +
                                                " exceeds the minimum stop count stops_min=" +
                                                std::to_string(c.stops_min));
  }
  if (!(c.bus_velocity_kmh.lo > 0.0) || c.bus_velocity_kmh.lo > c.bus_velocity_kmh.hi) {
    throw ConfigError("bus_velocity", "range must be positive and non-empty");
  }
  if (!(c.generation_period_s.lo > 0.0) || c.generation_period_s.lo > c.generation_period_s.hi) {
    throw ConfigError("generation_period", "range must be positive and non-empty");
  }
  if (c.num_offroute_sensors < 0) throw ConfigError("num_offroute_sensors", "must be >= 0");
  if (!(c.circumference_mean_km > 0.0)) throw ConfigError("circumference_mean", "must be positive");
  if (!(c.circumference_spread_km >= 0.0)) throw ConfigError("circumference_spread", "must be >= 0");
  if (!(c.pedestrian_arrival_mean_s > 0.0)) throw ConfigError("pedestrian_arrival_mean", "must be positive");
  if (!(c.pedestrian_arrival_spread_s >= 0.0)) throw ConfigError("pedestrian_arrival_spread", "must be >= 0");
  if (c.p_pedestrian_gateway && !(*c.p_pedestrian_gateway >= 0.0 && *c.p_pedestrian_gateway <= 1.0)) {
    throw ConfigError("p_pedestrian_gateway", "probability must lie in [0, 1]");
  }
}

const char* to_string(SensorKind kind) {
  return kind == SensorKind::kOnRoute ? "onroute" : "offroute";
}

// ---------------------------------------------------------------------------
// Scenario

ScenarioSummary Scenario::summary() const {
  ScenarioSummary s;
  s.route_count = static_cast<int>(routes.size());
  s.bus_count = static_cast<int>(buses.size());
  for (const auto& r : routes) {
    s.stop_count += static_cast<int>(r.stops.size());
    s.gateway_count += static_cast<int>(r.gateway_positions.size());
  }
  s.onroute_sensor_count = static_cast<int>(onroute_sensors.size());
  s.offroute_sensor_count = static_cast<int>(offroute_sensors.size());
  return s;
}

const RouteCircle& Scenario::route(std::string_view route_id) const {
  for (const auto& r : routes) {
    if (r.route_id == route_id) return r;
  }
  throw Error(ErrorCode::kLookup, "unknown route '" + std::string(route_id) + "'");
}

namespace {

std::string route_label(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%02d", index + 1);
  return buf;
}

std::string offroute_label(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "off%03d", index);
  return buf;
}

struct RouteShape {
  std::string route_id;
  double circumference_km;
  int stop_count;
  int bus_count;
};

// Fills stops, gateways, sensors and buses of one route.
void populate_route(const ScenarioConfig& config, const RouteShape& shape, int route_index,
                    RandomStream& route_rng, Scenario& out) {
  const double c = shape.circumference_km;
  const double velocity = route_rng.uniform(config.bus_velocity_kmh.lo, config.bus_velocity_kmh.hi);
  const int sensor_count = static_cast<int>(
      route_rng.uniform_int(config.onroute_sensors_per_route.lo, config.onroute_sensors_per_route.hi));
  const int gateway_count = static_cast<int>(std::min<long long>(
      route_rng.uniform_int(config.gateways_per_route.lo, config.gateways_per_route.hi), shape.stop_count));

  RouteCircle route;
  route.route_id = shape.route_id;
  route.circumference_km = c;

  RandomStream stop_rng(config.seed, "stops", static_cast<std::uint64_t>(route_index));
  route.stops.reserve(static_cast<std::size_t>(shape.stop_count));
  for (int i = 0; i < shape.stop_count; ++i) {
    route.stops.push_back({normalize_offset(stop_rng.uniform(0.0, c), c)});
  }
  std::sort(route.stops.begin(), route.stops.end());

  // Partial Fisher-Yates over stop indices picks distinct gateway stops.
  std::vector<std::size_t> order(route.stops.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int g = 0; g < gateway_count; ++g) {
    auto j = static_cast<std::size_t>(stop_rng.uniform_int(g, static_cast<long long>(order.size()) - 1));
    std::swap(order[static_cast<std::size_t>(g)], order[j]);
    route.gateway_positions.push_back(route.stops[order[static_cast<std::size_t>(g)]]);
  }
  std::sort(route.gateway_positions.begin(), route.gateway_positions.end());

  RandomStream sensor_rng(config.seed, "onroute-sensors", static_cast<std::uint64_t>(route_index));
  for (int s = 0; s < sensor_count; ++s) {
    SensorSpec sensor;
    sensor.sensor_id = shape.route_id + "/s" + std::to_string(s);
    sensor.kind = SensorKind::kOnRoute;
    sensor.route_id = shape.route_id;
    sensor.position = {normalize_offset(sensor_rng.uniform(0.0, c), c)};
    sensor.generation_period_s = sensor_rng.uniform(config.generation_period_s.lo, config.generation_period_s.hi);
    sensor.generation_phase_s = sensor_rng.uniform(0.0, sensor.generation_period_s);
    route.onroute_sensor_positions.push_back(sensor.position);
    out.onroute_sensors.push_back(std::move(sensor));
  }

  auto offsets = even_phase_offsets(shape.bus_count, c);
  for (int b = 0; b < shape.bus_count; ++b) {
    BusState bus;
    bus.bus_id = shape.route_id + "/b" + std::to_string(b);
    bus.route_id = shape.route_id;
    bus.initial_position = offsets[static_cast<std::size_t>(b)];
    bus.velocity_kmh = velocity;
    out.buses.push_back(std::move(bus));
  }
  out.routes.push_back(std::move(route));
}

void populate_offroute(const ScenarioConfig& config, Scenario& out) {
  for (int i = 0; i < config.num_offroute_sensors; ++i) {
    RandomStream rng(config.seed, "offroute-sensors", static_cast<std::uint64_t>(i));
    SensorSpec sensor;
    sensor.sensor_id = offroute_label(i);
    sensor.kind = SensorKind::kOffRoute;
    sensor.generation_period_s = rng.uniform(config.generation_period_s.lo, config.generation_period_s.hi);
    sensor.generation_phase_s = rng.uniform(0.0, sensor.generation_period_s);
    sensor.pedestrian_arrival_mean_s = config.pedestrian_arrival_mean_s;
    sensor.pedestrian_arrival_sd_s = config.pedestrian_arrival_sigma_s();
    out.offroute_sensors.push_back(std::move(sensor));
  }
  out.pedestrians.to_bus = config.pedestrian_to_bus;
  out.pedestrians.p_gateway = config.effective_p_pedestrian_gateway();
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
  validate_config(config);
  Scenario out;
  out.seed = config.seed;
  out.config_hash = config_hash(config);
  for (int r = 0; r < config.num_routes; ++r) {
    RandomStream route_rng(config.seed, "route", static_cast<std::uint64_t>(r));
    RouteShape shape;
    shape.route_id = route_label(r);
    shape.circumference_km =
        route_rng.truncated_normal_above(config.circumference_mean_km, config.circumference_sigma_km(), 0.0);
    long long stops = 0;
    do {
      stops = std::llround(route_rng.normal(config.stops_mean, config.stops_sigma()));
    } while (stops < config.stops_min);
    shape.stop_count = static_cast<int>(stops);
    shape.bus_count =
        static_cast<int>(route_rng.uniform_int(config.buses_per_route.lo, config.buses_per_route.hi));
    populate_route(config, shape, r, route_rng, out);
  }
  populate_offroute(config, out);
  validate_scenario(out);
  return out;
}

Scenario from_route_profiles(std::span<const RouteProfile> profiles, const ScenarioConfig& config) {
  if (profiles.empty()) throw ConfigError("profiles", "at least one route profile is required");
  ScenarioConfig effective = config;
  effective.num_routes = static_cast<int>(profiles.size());
  validate_config(effective);

  std::set<std::string> seen;
  for (const auto& p : profiles) {
    if (!(p.distance_km > 0.0) || !std::isfinite(p.distance_km)) {
      throw ConfigError("profiles", "route " + p.route_id + " has zero or invalid distance");
    }
    if (p.stop_count < 1) throw ConfigError("profiles", "route " + p.route_id + " has no stops");
    if (!seen.insert(p.route_id).second) throw ConfigError("profiles", "duplicate route id " + p.route_id);
  }

  Scenario out;
  out.seed = effective.seed;
  // the routes are part of the experiment, so they feed the hash too
  std::string key = config_hash(effective);
  for (const auto& p : profiles) {
    key += '\n' + p.route_id + ',' + format_number(p.distance_km) + ',' + std::to_string(p.stop_count) + ',' +
           std::to_string(p.bus_count);
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  out.config_hash = hash;
  int index = 0;
  for (const auto& p : profiles) {
    RandomStream route_rng(effective.seed, "route", static_cast<std::uint64_t>(index));
    RouteShape shape{p.route_id, p.distance_km, p.stop_count, std::max(1, p.bus_count)};
    populate_route(effective, shape, index, route_rng, out);
    ++index;
  }
  populate_offroute(effective, out);
  validate_scenario(out);
  return out;
}

void validate_scenario(const Scenario& scenario) {
  std::set<std::string, std::less<>> route_ids;
  std::map<std::string, int, std::less<>> buses_per_route;
  for (const auto& r : scenario.routes) {
    validate_route(r);
    if (!route_ids.insert(r.route_id).second) {
      throw Error(ErrorCode::kInvalidRoute, "duplicate route id " + r.route_id);
    }
  }
  for (const auto& b : scenario.buses) {
    if (!route_ids.contains(b.route_id)) {
      throw Error(ErrorCode::kInvalidRoute, "bus " + b.bus_id + " references unknown route " + b.route_id);
    }
    if (!(b.velocity_kmh > 0.0)) throw Error(ErrorCode::kInvalidParameter, "bus " + b.bus_id + " has no velocity");
    const auto& route = scenario.route(b.route_id);
    if (!(b.initial_position.km >= 0.0 && b.initial_position.km < route.circumference_km)) {
      throw Error(ErrorCode::kInvalidPosition, "bus " + b.bus_id + " starts off its route");
    }
    ++buses_per_route[b.route_id];
  }
  std::set<std::string, std::less<>> sensor_ids;
  for (const auto& s : scenario.onroute_sensors) {
    if (s.kind != SensorKind::kOnRoute) throw Error(ErrorCode::kInvalidParameter, s.sensor_id + " is not on-route");
    if (!route_ids.contains(s.route_id)) {
      throw Error(ErrorCode::kInvalidRoute, "sensor " + s.sensor_id + " references unknown route " + s.route_id);
    }
    const auto& route = scenario.route(s.route_id);
    if (!(s.position.km >= 0.0 && s.position.km < route.circumference_km)) {
      throw Error(ErrorCode::kInvalidPosition, "sensor " + s.sensor_id + " lies off its route");
    }
    if (!buses_per_route.contains(s.route_id)) {
      throw Error(ErrorCode::kInvalidRoute, "sensor " + s.sensor_id + " sits on a route with no bus");
    }
  }
  for (const auto& s : scenario.offroute_sensors) {
    if (s.kind != SensorKind::kOffRoute) throw Error(ErrorCode::kInvalidParameter, s.sensor_id + " is not off-route");
    if (!(s.pedestrian_arrival_mean_s > 0.0) || s.pedestrian_arrival_sd_s < 0.0) {
      throw Error(ErrorCode::kInvalidParameter, "sensor " + s.sensor_id + " has no pedestrian arrival process");
    }
  }
  if (!scenario.offroute_sensors.empty() && scenario.buses.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "off-route sensors need at least one bus to board");
  }
  for (const auto* list : {&scenario.onroute_sensors, &scenario.offroute_sensors}) {
    for (const auto& s : *list) {
      if (!(s.generation_period_s > 0.0)) {
        throw Error(ErrorCode::kInvalidParameter, "sensor " + s.sensor_id + " needs a positive generation period");
      }
      if (s.generation_phase_s < 0.0) {
        throw Error(ErrorCode::kInvalidParameter, "sensor " + s.sensor_id + " has a negative phase");
      }
      if (!sensor_ids.insert(s.sensor_id).second) {
        throw Error(ErrorCode::kInvalidParameter, "duplicate sensor id " + s.sensor_id);
      }
    }
  }
  const double p = scenario.pedestrians.p_gateway;
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidParameter, "p_gateway outside [0, 1]");
}

std::string scenario_to_json(const Scenario& scenario) {
  using nlohmann::ordered_json;
  auto positions = [](const std::vector<ArcPosition>& ps) {
    ordered_json a = ordered_json::array();
    for (auto p : ps) a.push_back(p.km);
    return a;
  };
  ordered_json j;
  j["seed"] = scenario.seed;
  j["config_hash"] = scenario.config_hash;
  ordered_json routes = ordered_json::array();
  for (const auto& r : scenario.routes) {
    routes.push_back({{"route_id", r.route_id},
                      {"circumference_km", r.circumference_km},
                      {"stops", positions(r.stops)},
                      {"gateways", positions(r.gateway_positions)},
                      {"onroute_sensors", positions(r.onroute_sensor_positions)}});
  }
  j["routes"] = routes;
  ordered_json buses = ordered_json::array();
  for (const auto& b : scenario.buses) {
    buses.push_back({{"bus_id", b.bus_id},
                     {"route_id", b.route_id},
                     {"initial_position_km", b.initial_position.km},
                     {"velocity_kmh", b.velocity_kmh}});
  }
  j["buses"] = buses;
  auto sensors = [](const std::vector<SensorSpec>& list) {
    ordered_json a = ordered_json::array();
    for (const auto& s : list) {
      ordered_json o{{"sensor_id", s.sensor_id}, {"kind", to_string(s.kind)}};
      if (s.kind == SensorKind::kOnRoute) {
        o["route_id"] = s.route_id;
        o["position_km"] = s.position.km;
      } else {
        o["pedestrian_arrival_mean_s"] = s.pedestrian_arrival_mean_s;
        o["pedestrian_arrival_sd_s"] = s.pedestrian_arrival_sd_s;
      }
      o["generation_period_s"] = s.generation_period_s;
      o["generation_phase_s"] = s.generation_phase_s;
      a.push_back(std::move(o));
    }
    return a;
  };
  j["onroute_sensors"] = sensors(scenario.onroute_sensors);
  j["offroute_sensors"] = sensors(scenario.offroute_sensors);
  j["pedestrians"] = {{"to_bus", scenario.pedestrians.to_bus.to_string()},
                      {"p_gateway", scenario.pedestrians.p_gateway}};
  return j.dump(2) + "\n";
}

}  // namespace dtnsim
