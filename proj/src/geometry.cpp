#include "dtnsim/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dtnsim/error.hpp"
#include "dtnsim/units.hpp"

namespace dtnsim {
namespace {

void require_circumference(double circumference_km) {
  if (!(circumference_km > 0.0) || !std::isfinite(circumference_km)) {
    throw Error(ErrorCode::kInvalidRoute, "route circumference must be positive, got " +
                                              format_number(circumference_km));
  }
}

void require_on_circle(ArcPosition p, double circumference_km, const char* what) {
  if (!(p.km >= 0.0 && p.km < circumference_km)) {
    throw Error(ErrorCode::kInvalidPosition, std::string(what) + " offset " + format_number(p.km) +
                                                 " km is outside [0, " + format_number(circumference_km) + ")");
  }
}

void require_time(double t_s) {
  if (!(t_s >= 0.0) || !std::isfinite(t_s)) {
    throw Error(ErrorCode::kInvalidTime, "time must be a finite value >= 0, got " + format_number(t_s));
  }
}

void require_velocity(const BusState& bus) {
  if (!(bus.velocity_kmh > 0.0) || !std::isfinite(bus.velocity_kmh)) {
    throw Error(ErrorCode::kInvalidParameter, "bus " + bus.bus_id + " must have positive velocity");
  }
}

}  // namespace

void validate_route(const RouteCircle& route) {
  require_circumference(route.circumference_km);
  const double c = route.circumference_km;
  for (auto p : route.stops) require_on_circle(p, c, "stop");
  for (auto p : route.onroute_sensor_positions) require_on_circle(p, c, "sensor");
  if (route.gateway_positions.empty()) {
    throw Error(ErrorCode::kMissingGateway, "route " + route.route_id + " has no gateway");
  }
  for (auto g : route.gateway_positions) {
    require_on_circle(g, c, "gateway");
    if (std::find(route.stops.begin(), route.stops.end(), g) == route.stops.end()) {
      throw Error(ErrorCode::kInvalidRoute, "route " + route.route_id + ": gateway at " +
                                                format_number(g.km) + " km is not a stop");
    }
  }
}

double normalize_offset(double offset_km, double circumference_km) {
  require_circumference(circumference_km);
  double r = std::fmod(offset_km, circumference_km);
  if (r < 0.0) r += circumference_km;
  if (circumference_km - r <= kArcTolerance) r = 0.0;
  return r;
}

double arc_distance(ArcPosition from, ArcPosition to, double circumference_km) {
  require_circumference(circumference_km);
  return normalize_offset(to.km - from.km, circumference_km);
}

double circular_gap(ArcPosition a, ArcPosition b, double circumference_km) {
  double d = arc_distance(a, b, circumference_km);
  return std::min(d, circumference_km - d);
}

ArcPosition bus_position_at(const BusState& bus, double t_s, double circumference_km) {
  require_time(t_s);
  require_velocity(bus);
  return {normalize_offset(bus.initial_position.km + bus.velocity_kmh * to_hours(t_s), circumference_km)};
}

double next_crossing_time(const BusState& bus, ArcPosition target, double t_from_s,
                          double circumference_km) {
  auto here = bus_position_at(bus, t_from_s, circumference_km);
  return t_from_s + hours(arc_distance(here, target, circumference_km) / bus.velocity_kmh);
}

double crossing_time_on_lap(const BusState& bus, ArcPosition target, long long lap,
                            double circumference_km) {
  require_velocity(bus);
  double d = arc_distance(bus.initial_position, target, circumference_km) +
             static_cast<double>(lap) * circumference_km;
  return hours(d / bus.velocity_kmh);
}

double loop_time(const BusState& bus, double circumference_km) {
  require_circumference(circumference_km);
  require_velocity(bus);
  return hours(circumference_km / bus.velocity_kmh);
}

std::vector<ArcPosition> even_phase_offsets(int bus_count, double circumference_km) {
  require_circumference(circumference_km);
  std::vector<ArcPosition> out;
  out.reserve(static_cast<std::size_t>(std::max(bus_count, 0)));
  for (int k = 0; k < bus_count; ++k) {
    out.push_back({normalize_offset(circumference_km * k / bus_count, circumference_km)});
  }
  return out;
}

}  // namespace dtnsim
