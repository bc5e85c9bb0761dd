#include "dtnsim/analytic.hpp"

#include <cmath>
#include <limits>

#include "dtnsim/error.hpp"
#include "dtnsim/units.hpp"

namespace dtnsim::analytic {
namespace {

void require_position(const RouteCircle& route, ArcPosition p, const char* what) {
  if (!(p.km >= 0.0 && p.km < route.circumference_km)) {
    throw Error(ErrorCode::kInvalidPosition,
                std::string(what) + " at " + format_number(p.km) + " km is not on route " + route.route_id);
  }
}

void require_nonnegative(double value, const char* what) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidParameter, std::string(what) + " must be finite and >= 0");
  }
}

}  // namespace

double t_sb(const RouteCircle& route, const BusState& bus, ArcPosition sensor, double t_s) {
  require_position(route, sensor, "sensor");
  auto here = bus_position_at(bus, t_s, route.circumference_km);
  return hours(arc_distance(here, sensor, route.circumference_km) / bus.velocity_kmh);
}

double t_sb(const RouteCircle& route, std::span<const BusState> buses, ArcPosition sensor, double t_s) {
  if (buses.empty()) throw Error(ErrorCode::kInvalidParameter, "route " + route.route_id + " has no bus");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& bus : buses) best = std::min(best, t_sb(route, bus, sensor, t_s));
  return best;
}

double t_bg(const RouteCircle& route, const BusState& bus, ArcPosition sensor, ArcPosition gateway,
            double t_s) {
  require_position(route, sensor, "sensor");
  require_position(route, gateway, "gateway");
  if (t_s < 0.0) throw Error(ErrorCode::kInvalidTime, "time must be >= 0");
  // At t + T_SB the bus stands on the sensor, so only the sensor->gateway arc matters.
  return hours(arc_distance(sensor, gateway, route.circumference_km) / bus.velocity_kmh);
}

ArcPosition nearest_gateway_ahead(const RouteCircle& route, ArcPosition from) {
  if (route.gateway_positions.empty()) {
    throw Error(ErrorCode::kMissingGateway, "route " + route.route_id + " has no gateway");
  }
  ArcPosition best = route.gateway_positions.front();
  double best_d = arc_distance(from, best, route.circumference_km);
  for (auto g : route.gateway_positions) {
    double d = arc_distance(from, g, route.circumference_km);
    if (d < best_d) {
      best = g;
      best_d = d;
    }
  }
  return best;
}

double t_bg(const RouteCircle& route, const BusState& bus, ArcPosition sensor, double t_s) {
  return t_bg(route, bus, sensor, nearest_gateway_ahead(route, sensor), t_s);
}

OnRouteLatencyBreakdown t_d_on(const RouteCircle& route, const BusState& bus, ArcPosition sensor,
                               ArcPosition gateway, double t_s) {
  OnRouteLatencyBreakdown out;
  out.t_sb = t_sb(route, bus, sensor, t_s);
  out.t_bg = t_bg(route, bus, sensor, gateway, t_s + out.t_sb);
  out.t_d_on = out.t_sb + out.t_bg;
  return out;
}

OnRouteLatencyBreakdown t_d_on(const RouteCircle& route, const BusState& bus, ArcPosition sensor,
                               double t_s) {
  return t_d_on(route, bus, sensor, nearest_gateway_ahead(route, sensor), t_s);
}

OnRouteLatencyBreakdown t_d_on(const RouteCircle& route, std::span<const BusState> buses,
                               ArcPosition sensor, double t_s) {
  if (buses.empty()) throw Error(ErrorCode::kInvalidParameter, "route " + route.route_id + " has no bus");
  const BusState* first = &buses.front();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& bus : buses) {
    double wait = t_sb(route, bus, sensor, t_s);
    if (wait < best) {
      best = wait;
      first = &bus;
    }
  }
  return t_d_on(route, *first, sensor, t_s);
}

double max_t_d_on(const RouteCircle& route, const BusState& bus) {
  return 2.0 * loop_time(bus, route.circumference_km);
}

OffRouteLatencyBreakdown t_d_off(double e_t_sp, double e_t_pb, const RouteCircle& route,
                                 const BusState& bus, ArcPosition boarding_point, ArcPosition gateway,
                                 double t_s) {
  require_nonnegative(e_t_sp, "expected sensor-to-pedestrian delay");
  require_nonnegative(e_t_pb, "expected pedestrian-to-bus delay");
  auto tail = t_d_on(route, bus, boarding_point, gateway, t_s);
  OffRouteLatencyBreakdown out;
  out.e_t_sp = e_t_sp;
  out.e_t_pb = e_t_pb;
  out.t_sb = tail.t_sb;
  out.t_bg = tail.t_bg;
  out.t_d_off = e_t_sp + e_t_pb + tail.t_sb + tail.t_bg;
  return out;
}

double max_t_d_off(double max_t_sp, double max_t_pb, const RouteCircle& route, const BusState& bus) {
  require_nonnegative(max_t_sp, "max sensor-to-pedestrian delay");
  require_nonnegative(max_t_pb, "max pedestrian-to-bus delay");
  return max_t_sp + max_t_pb + max_t_d_on(route, bus);
}

}  // namespace dtnsim::analytic
