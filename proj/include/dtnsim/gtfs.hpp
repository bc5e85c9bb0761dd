#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dtnsim/route_profile.hpp"

// Static GTFS ingestion: one RouteProfile per route, plus the summary
// statistics used to characterise a city's network.
namespace dtnsim::gtfs {

/// Mean Earth radius (IUGG), km.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Endpoints closer than this (km) make a trip or shape a closed loop.
inline constexpr double kLoopClosureKm = 0.05;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

double haversine_km(LatLon a, LatLon b);

double polyline_length_km(std::span<const LatLon> points);

/// Seconds since service-day midnight; hours may exceed 23.
int parse_gtfs_time(std::string_view text);

struct FeedWarning {
  std::string route_id;
  std::string message;

  bool operator==(const FeedWarning&) const = default;
};

struct FeedParseResult {
  std::vector<RouteProfile> profiles;  ///< sorted by route_id
  std::vector<FeedWarning> warnings;   ///< routes left out, with the reason
};

/// Parses a GTFS directory or .zip archive.
///
/// distance: length of the longest trip's shape when shapes.txt covers it,
///   otherwise the haversine sum over that trip's ordered stops. The longest
///   trip has the most stop_times rows (ties: smallest trip_id). A trip whose
///   endpoints meet within kLoopClosureKm is a loop; any other is doubled to
///   an out-and-back round trip.
/// stop_count: distinct stops served by any of the route's trips.
/// bus_count: peak number of trips running at once, each trip occupying
///   [first departure, last arrival). Trips listed in frequencies.txt expand
///   to one run per headway in each window.
///
/// Throws FeedError for a missing required file or a malformed row.
FeedParseResult parse_feed(const std::filesystem::path& path);

struct FeedStatistics {
  std::size_t route_count = 0;
  double distance_mean_km = 0.0;
  double distance_sd_km = 0.0;
  double stops_mean = 0.0;
  double stops_sd = 0.0;
  double buses_mean = 0.0;
  double buses_sd = 0.0;
};

/// Population means and standard deviations. Throws kStatistics when empty.
FeedStatistics feed_statistics(std::span<const RouteProfile> profiles);

inline constexpr std::string_view kProfilesHeader = "route_id,route_name,distance_km,stop_count,bus_count,source";
inline constexpr std::string_view kStatisticsHeader =
    "route_count,distance_mean_km,distance_sd_km,stops_mean,stops_sd,buses_mean,buses_sd";

void write_profiles_csv(std::ostream& out, std::span<const RouteProfile> profiles);
std::vector<RouteProfile> read_profiles_csv(std::istream& in, const std::string& name = "route_profiles.csv");
std::vector<RouteProfile> load_profiles(const std::filesystem::path& path);

void write_statistics_csv(std::ostream& out, const FeedStatistics& stats);
std::string format_statistics_table(const FeedStatistics& stats);

}  // namespace dtnsim::gtfs
