#pragma once

#include <span>

#include "dtnsim/geometry.hpp"

// Closed-form delivery latency for data carried by buses, with and without a
// pedestrian leg in front. All durations are seconds; `t_s` is the instant the
// datum becomes available at the pickup point.
namespace dtnsim::analytic {

struct OnRouteLatencyBreakdown {
  double t_sb = 0.0;  ///< sensor waits for the bus
  double t_bg = 0.0;  ///< bus carries the datum to the gateway
  double t_d_on = 0.0;

  bool operator==(const OnRouteLatencyBreakdown&) const = default;
};

struct OffRouteLatencyBreakdown {
  double e_t_sp = 0.0;  ///< expected wait for a pedestrian at the sensor
  double e_t_pb = 0.0;  ///< expected pedestrian trip to a bus
  double t_sb = 0.0;
  double t_bg = 0.0;
  double t_d_off = 0.0;

  bool operator==(const OffRouteLatencyBreakdown&) const = default;
};

/// Wait until `bus` reaches `sensor`, starting at `t_s`.
double t_sb(const RouteCircle& route, const BusState& bus, ArcPosition sensor, double t_s);

/// Wait until the first of `buses` reaches `sensor`.
double t_sb(const RouteCircle& route, std::span<const BusState> buses, ArcPosition sensor, double t_s);

/// Carry time from the pickup point to an explicit gateway.
double t_bg(const RouteCircle& route, const BusState& bus, ArcPosition sensor, ArcPosition gateway,
            double t_s);

/// Carry time to the first of the route's gateways reached after `sensor`.
double t_bg(const RouteCircle& route, const BusState& bus, ArcPosition sensor, double t_s);

/// The first gateway met when travelling forward from `from` (itself included).
ArcPosition nearest_gateway_ahead(const RouteCircle& route, ArcPosition from);

OnRouteLatencyBreakdown t_d_on(const RouteCircle& route, const BusState& bus, ArcPosition sensor,
                               ArcPosition gateway, double t_s);

/// Nearest-gateway form.
OnRouteLatencyBreakdown t_d_on(const RouteCircle& route, const BusState& bus, ArcPosition sensor,
                               double t_s);

/// Several buses share the route: the first to arrive picks up and carries.
OnRouteLatencyBreakdown t_d_on(const RouteCircle& route, std::span<const BusState> buses,
                               ArcPosition sensor, double t_s);

/// Strict upper bound 2C/v on t_d_on.
double max_t_d_on(const RouteCircle& route, const BusState& bus);

/// Adds the expected pedestrian legs to the on-route tail evaluated at
/// `t_s` from `boarding_point`. Throws kInvalidParameter on negative means.
OffRouteLatencyBreakdown t_d_off(double e_t_sp, double e_t_pb, const RouteCircle& route,
                                 const BusState& bus, ArcPosition boarding_point, ArcPosition gateway,
                                 double t_s);

double max_t_d_off(double max_t_sp, double max_t_pb, const RouteCircle& route, const BusState& bus);

}  // namespace dtnsim::analytic
