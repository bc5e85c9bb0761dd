#pragma once

#include <compare>
#include <string>
#include <vector>

namespace dtnsim {

/// Tolerance for modular arithmetic on the circle, in km. Offsets within this
/// distance of the circumference snap to 0.
inline constexpr double kArcTolerance = 1e-9;

/// Offset in km along the direction of travel, measured from the route origin.
struct ArcPosition {
  double km = 0.0;
  auto operator<=>(const ArcPosition&) const = default;
};

/// A bus route collapsed onto a circle whose circumference is the round-trip
/// length. Every stop, gateway and on-route sensor lives at an arc offset.
struct RouteCircle {
  std::string route_id;
  double circumference_km = 0.0;
  std::vector<ArcPosition> stops;
  std::vector<ArcPosition> gateway_positions;
  std::vector<ArcPosition> onroute_sensor_positions;

  bool operator==(const RouteCircle&) const = default;
};

/// Deterministic mover: position(t) = initial + velocity * t (mod C).
/// Message buffers live in the engine; this type only describes motion.
struct BusState {
  std::string bus_id;
  std::string route_id;
  ArcPosition initial_position;
  double velocity_kmh = 0.0;

  bool operator==(const BusState&) const = default;
};

/// Throws kInvalidRoute unless the circle is well formed: positive
/// circumference, all offsets in [0, C), at least one gateway, gateways drawn
/// from the stop list.
void validate_route(const RouteCircle& route);

/// Reduces `offset_km` into [0, C), snapping values within kArcTolerance of C to 0.
double normalize_offset(double offset_km, double circumference_km);

/// Distance travelled from `from` to `to` in the direction of motion, in [0, C).
double arc_distance(ArcPosition from, ArcPosition to, double circumference_km);

/// Circular distance in either direction, used for tolerance checks.
double circular_gap(ArcPosition a, ArcPosition b, double circumference_km);

/// Position at `t_s` seconds after the start of the run.
ArcPosition bus_position_at(const BusState& bus, double t_s, double circumference_km);

/// Earliest t >= t_from_s at which the bus sits on `target`. The result lies in
/// [t_from_s, t_from_s + C/v).
double next_crossing_time(const BusState& bus, ArcPosition target, double t_from_s,
                          double circumference_km);

/// Time at which the bus passes `target` for the (lap+1)-th time, computed
/// from t = 0 without accumulating rounding across laps.
double crossing_time_on_lap(const BusState& bus, ArcPosition target, long long lap,
                            double circumference_km);

/// Round-trip time C/v in seconds.
double loop_time(const BusState& bus, double circumference_km);

/// Evenly spaced start offsets: the k-th of n buses begins at k*C/n.
std::vector<ArcPosition> even_phase_offsets(int bus_count, double circumference_km);

}  // namespace dtnsim
