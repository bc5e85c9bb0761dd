#pragma once

#include <string>

namespace dtnsim {

/// One transit route reduced to what the circle model needs.
struct RouteProfile {
  std::string route_id;
  std::string route_name;
  double distance_km = 0.0;  ///< loop length (out-and-back for linear routes)
  int stop_count = 0;
  int bus_count = 0;  ///< peak concurrent vehicles
  std::string source;

  bool operator==(const RouteProfile&) const = default;
};

}  // namespace dtnsim
