#include "dtnsim/gtfs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dtnsim/csv.hpp"
#include "dtnsim/error.hpp"
#include "dtnsim/units.hpp"
#include "dtnsim/zip_reader.hpp"

namespace dtnsim::gtfs {

double haversine_km(LatLon a, LatLon b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kRad;
  const double dlon = (b.lon - a.lon) * kRad;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * t * t;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double polyline_length_km(std::span<const LatLon> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += haversine_km(points[i - 1], points[i]);
  return total;
}

int parse_gtfs_time(std::string_view text) {
  int parts[3] = {0, 0, 0};
  std::size_t at = 0;
  for (int i = 0; i < 3; ++i) {
    while (at < text.size() && text[at] == ' ') ++at;
    auto [ptr, ec] = std::from_chars(text.data() + at, text.data() + text.size(), parts[i]);
    if (ec != std::errc{} || parts[i] < 0) throw Error(ErrorCode::kFeedFormat, "bad time '" + std::string(text) + "'");
    at = static_cast<std::size_t>(ptr - text.data());
    if (i < 2) {
      if (at >= text.size() || text[at] != ':') throw Error(ErrorCode::kFeedFormat, "bad time '" + std::string(text) + "'");
      ++at;
    }
  }
  while (at < text.size() && text[at] == ' ') ++at;
  if (at != text.size() || parts[1] > 59 || parts[2] > 59) {
    throw Error(ErrorCode::kFeedFormat, "bad time '" + std::string(text) + "'");
  }
  return parts[0] * 3600 + parts[1] * 60 + parts[2];
}

namespace {

class FeedSource {
 public:
  explicit FeedSource(const std::filesystem::path& path) : path_(path) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      directory_ = true;
    } else if (fs::is_regular_file(path, ec)) {
      files_ = read_zip_archive(path);
    } else {
      throw FeedError(path.string(), 0, "no such feed directory or archive");
    }
  }

  std::optional<std::string> read(const std::string& name) const {
    if (!directory_) {
      auto it = files_.find(name);
      if (it == files_.end()) return std::nullopt;
      return it->second;
    }
    std::ifstream in(path_ / name, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  csv::Table required(const std::string& name) const {
    auto content = read(name);
    if (!content) throw FeedError(name, 0, "required GTFS file is missing from " + path_.string());
    return csv::parse(name, *content);
  }

  std::optional<csv::Table> optional(const std::string& name) const {
    auto content = read(name);
    if (!content) return std::nullopt;
    return csv::parse(name, *content);
  }

  std::string identifier() const {
    auto p = path_.lexically_normal();
    auto name = p.filename().string();
    if (name.empty()) name = p.parent_path().filename().string();
    return name.empty() ? p.string() : name;
  }

 private:
  std::filesystem::path path_;
  bool directory_ = false;
  std::map<std::string, std::string> files_;
};

struct Cell {
  const csv::Table& table;
  std::size_t row;

  const std::string& at(std::size_t col) const { return table.rows[row][col]; }
  std::size_t line() const { return table.lines[row]; }

  [[noreturn]] void fail(const std::string& message) const { throw FeedError(table.file, line(), message); }

  double number(std::size_t col) const {
    const auto& s = at(col);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      fail("bad number '" + s + "' in column " + table.header[col]);
    }
    return v;
  }

  long long integer(std::size_t col) const {
    const auto& s = at(col);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      fail("bad integer '" + s + "' in column " + table.header[col]);
    }
    return v;
  }

  std::optional<int> time(std::size_t col) const {
    const auto& s = at(col);
    if (s.empty()) return std::nullopt;
    try {
      return parse_gtfs_time(s);
    } catch (const Error&) {
      fail("bad time '" + s + "' in column " + table.header[col]);
    }
  }
};

struct StopTime {
  long long sequence = 0;
  std::string stop_id;
  std::optional<int> arrival;
  std::optional<int> departure;
};

struct Trip {
  std::string trip_id;
  std::string route_id;
  std::string shape_id;
  std::vector<StopTime> stop_times;
};

struct ShapePoint {
  long long sequence = 0;
  LatLon point;
};

struct Frequency {
  int start = 0;
  int end = 0;
  int headway = 0;
};

}  // namespace

FeedParseResult parse_feed(const std::filesystem::path& path) {
  FeedSource source(path);
  const auto routes_t = source.required("routes.txt");
  const auto trips_t = source.required("trips.txt");
  const auto stops_t = source.required("stops.txt");
  const auto stop_times_t = source.required("stop_times.txt");
  const auto shapes_t = source.optional("shapes.txt");
  const auto freq_t = source.optional("frequencies.txt");

  // routes
  std::map<std::string, std::string> route_names;
  {
    auto c_id = routes_t.require_column("route_id");
    int c_short = routes_t.column("route_short_name");
    int c_long = routes_t.column("route_long_name");
    for (std::size_t i = 0; i < routes_t.rows.size(); ++i) {
      Cell cell{routes_t, i};
      const auto& id = cell.at(c_id);
      if (id.empty()) cell.fail("empty route_id");
      std::string name;
      if (c_short >= 0) name = cell.at(static_cast<std::size_t>(c_short));
      if (name.empty() && c_long >= 0) name = cell.at(static_cast<std::size_t>(c_long));
      if (!route_names.emplace(id, name).second) cell.fail("duplicate route_id " + id);
    }
  }

  // stops
  std::unordered_map<std::string, std::optional<LatLon>> stops;
  {
    auto c_id = stops_t.require_column("stop_id");
    auto c_lat = stops_t.require_column("stop_lat");
    auto c_lon = stops_t.require_column("stop_lon");
    for (std::size_t i = 0; i < stops_t.rows.size(); ++i) {
      Cell cell{stops_t, i};
      const auto& id = cell.at(c_id);
      if (id.empty()) cell.fail("empty stop_id");
      std::optional<LatLon> where;
      if (!cell.at(c_lat).empty() || !cell.at(c_lon).empty()) {
        LatLon p{cell.number(c_lat), cell.number(c_lon)};
        if (std::abs(p.lat) > 90.0 || std::abs(p.lon) > 180.0) cell.fail("coordinates out of range");
        where = p;
      }
      if (!stops.emplace(id, where).second) cell.fail("duplicate stop_id " + id);
    }
  }

  // trips
  std::map<std::string, Trip> trips;
  {
    auto c_route = trips_t.require_column("route_id");
    auto c_trip = trips_t.require_column("trip_id");
    int c_shape = trips_t.column("shape_id");
    for (std::size_t i = 0; i < trips_t.rows.size(); ++i) {
      Cell cell{trips_t, i};
      Trip t;
      t.trip_id = cell.at(c_trip);
      t.route_id = cell.at(c_route);
      if (t.trip_id.empty()) cell.fail("empty trip_id");
      if (!route_names.contains(t.route_id)) cell.fail("trip " + t.trip_id + " references unknown route " + t.route_id);
      if (c_shape >= 0) t.shape_id = cell.at(static_cast<std::size_t>(c_shape));
      if (!trips.emplace(t.trip_id, t).second) cell.fail("duplicate trip_id " + t.trip_id);
    }
  }

  // stop_times
  {
    auto c_trip = stop_times_t.require_column("trip_id");
    auto c_stop = stop_times_t.require_column("stop_id");
    auto c_seq = stop_times_t.require_column("stop_sequence");
    auto c_arr = stop_times_t.require_column("arrival_time");
    auto c_dep = stop_times_t.require_column("departure_time");
    for (std::size_t i = 0; i < stop_times_t.rows.size(); ++i) {
      Cell cell{stop_times_t, i};
      auto it = trips.find(cell.at(c_trip));
      if (it == trips.end()) cell.fail("unknown trip_id " + cell.at(c_trip));
      const auto& stop_id = cell.at(c_stop);
      auto stop = stops.find(stop_id);
      if (stop == stops.end()) cell.fail("unknown stop_id " + stop_id);
      if (!stop->second) cell.fail("stop " + stop_id + " has no coordinates");
      it->second.stop_times.push_back({cell.integer(c_seq), stop_id, cell.time(c_arr), cell.time(c_dep)});
    }
  }

  std::map<std::string, std::vector<ShapePoint>> shapes;
  if (shapes_t) {
    auto c_id = shapes_t->require_column("shape_id");
    auto c_lat = shapes_t->require_column("shape_pt_lat");
    auto c_lon = shapes_t->require_column("shape_pt_lon");
    auto c_seq = shapes_t->require_column("shape_pt_sequence");
    for (std::size_t i = 0; i < shapes_t->rows.size(); ++i) {
      Cell cell{*shapes_t, i};
      shapes[cell.at(c_id)].push_back({cell.integer(c_seq), {cell.number(c_lat), cell.number(c_lon)}});
    }
  }

  std::map<std::string, std::vector<Frequency>> frequencies;
  if (freq_t) {
    auto c_trip = freq_t->require_column("trip_id");
    auto c_start = freq_t->require_column("start_time");
    auto c_end = freq_t->require_column("end_time");
    auto c_headway = freq_t->require_column("headway_secs");
    for (std::size_t i = 0; i < freq_t->rows.size(); ++i) {
      Cell cell{*freq_t, i};
      if (!trips.contains(cell.at(c_trip))) cell.fail("unknown trip_id " + cell.at(c_trip));
      auto start = cell.time(c_start);
      auto end = cell.time(c_end);
      auto headway = cell.integer(c_headway);
      if (!start || !end) cell.fail("frequency window needs start_time and end_time");
      if (headway <= 0) cell.fail("headway_secs must be positive");
      frequencies[cell.at(c_trip)].push_back({*start, *end, static_cast<int>(headway)});
    }
  }

  // Canonical orderings make the result independent of row order.
  for (auto& [id, t] : trips) {
    std::sort(t.stop_times.begin(), t.stop_times.end(), [](const StopTime& a, const StopTime& b) {
      return std::tie(a.sequence, a.stop_id) < std::tie(b.sequence, b.stop_id);
    });
  }
  for (auto& [id, pts] : shapes) {
    std::sort(pts.begin(), pts.end(), [](const ShapePoint& a, const ShapePoint& b) {
      return std::tie(a.sequence, a.point.lat, a.point.lon) < std::tie(b.sequence, b.point.lat, b.point.lon);
    });
  }
  for (auto& [id, fs] : frequencies) {
    std::sort(fs.begin(), fs.end(), [](const Frequency& a, const Frequency& b) {
      return std::tie(a.start, a.end, a.headway) < std::tie(b.start, b.end, b.headway);
    });
  }

  std::map<std::string, std::vector<const Trip*>> trips_by_route;
  for (const auto& [id, t] : trips) trips_by_route[t.route_id].push_back(&t);

  FeedParseResult result;
  const std::string feed_id = source.identifier();
  for (const auto& [route_id, name] : route_names) {
    auto found = trips_by_route.find(route_id);
    if (found == trips_by_route.end()) {
      result.warnings.push_back({route_id, "route has no trips; excluded"});
      continue;
    }
    const auto& route_trips = found->second;  // ordered by trip_id

    const Trip* longest = nullptr;
    std::set<std::string> distinct_stops;
    for (const auto* t : route_trips) {
      for (const auto& st : t->stop_times) distinct_stops.insert(st.stop_id);
      if (!longest || t->stop_times.size() > longest->stop_times.size()) longest = t;
    }

    double one_way = 0.0;
    bool loop = false;
    auto shape = longest->shape_id.empty() ? shapes.end() : shapes.find(longest->shape_id);
    if (shape != shapes.end() && shape->second.size() >= 2) {
      std::vector<LatLon> pts;
      for (const auto& p : shape->second) pts.push_back(p.point);
      one_way = polyline_length_km(pts);
      loop = haversine_km(pts.front(), pts.back()) < kLoopClosureKm;
    } else if (longest->stop_times.size() >= 2) {
      std::vector<LatLon> pts;
      for (const auto& st : longest->stop_times) pts.push_back(*stops.at(st.stop_id));
      one_way = polyline_length_km(pts);
      loop = longest->stop_times.front().stop_id == longest->stop_times.back().stop_id ||
             haversine_km(pts.front(), pts.back()) < kLoopClosureKm;
    }
    const double distance = loop ? one_way : 2.0 * one_way;
    if (!(distance > 0.0) || !std::isfinite(distance)) {
      result.warnings.push_back({route_id, "route has zero distance; excluded"});
      continue;
    }
    if (distinct_stops.size() < 2) {
      result.warnings.push_back({route_id, "route serves fewer than two stops; excluded"});
      continue;
    }

    // Peak concurrency over [start, end) intervals; an end and a start at the
    // same instant do not overlap.
    std::vector<std::pair<long long, int>> edges;
    for (const auto* t : route_trips) {
      if (t->stop_times.empty()) continue;
      const auto& first = t->stop_times.front();
      const auto& last = t->stop_times.back();
      auto start = first.departure ? first.departure : first.arrival;
      auto end = last.arrival ? last.arrival : last.departure;
      if (!start || !end || *end < *start) continue;
      auto f = frequencies.find(t->trip_id);
      if (f == frequencies.end()) {
        edges.emplace_back(*start, +1);
        edges.emplace_back(*end, -1);
        continue;
      }
      const int duration = *end - *start;
      for (const auto& w : f->second) {
        for (long long s = w.start; s < w.end; s += w.headway) {
          edges.emplace_back(s, +1);
          edges.emplace_back(s + duration, -1);
        }
      }
    }
    std::sort(edges.begin(), edges.end());
    int running = 0;
    int peak = 0;
    for (const auto& [t, delta] : edges) {
      running += delta;
      peak = std::max(peak, running);
    }
    if (peak == 0) {
      peak = 1;
      result.warnings.push_back({route_id, "no timed trips; bus count defaults to 1"});
    }

    result.profiles.push_back(
        {route_id, name, distance, static_cast<int>(distinct_stops.size()), peak, feed_id});
  }
  return result;
}

FeedStatistics feed_statistics(std::span<const RouteProfile> profiles) {
  if (profiles.empty()) throw Error(ErrorCode::kStatistics, "no route profiles to summarise");
  FeedStatistics s;
  s.route_count = profiles.size();
  const double n = static_cast<double>(profiles.size());
  auto mean_sd = [&](auto value, double& mean, double& sd) {
    double sum = 0.0;
    for (const auto& p : profiles) sum += value(p);
    mean = sum / n;
    double ss = 0.0;
    for (const auto& p : profiles) ss += (value(p) - mean) * (value(p) - mean);
    sd = std::sqrt(ss / n);
  };
  mean_sd([](const RouteProfile& p) { return p.distance_km; }, s.distance_mean_km, s.distance_sd_km);
  mean_sd([](const RouteProfile& p) { return static_cast<double>(p.stop_count); }, s.stops_mean, s.stops_sd);
  mean_sd([](const RouteProfile& p) { return static_cast<double>(p.bus_count); }, s.buses_mean, s.buses_sd);
  return s;
}

void write_profiles_csv(std::ostream& out, std::span<const RouteProfile> profiles) {
  out << kProfilesHeader << '\n';
  for (const auto& p : profiles) {
    out << csv::escape(p.route_id) << ',' << csv::escape(p.route_name) << ',' << format_number(p.distance_km) << ','
        << p.stop_count << ',' << p.bus_count << ',' << csv::escape(p.source) << '\n';
  }
}

std::vector<RouteProfile> read_profiles_csv(std::istream& in, const std::string& name) {
  std::ostringstream buf;
  buf << in.rdbuf();
  auto table = csv::parse(name, buf.str());
  auto c_id = table.require_column("route_id");
  auto c_name = table.require_column("route_name");
  auto c_dist = table.require_column("distance_km");
  auto c_stops = table.require_column("stop_count");
  auto c_buses = table.require_column("bus_count");
  int c_source = table.column("source");
  std::vector<RouteProfile> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    Cell cell{table, i};
    RouteProfile p;
    p.route_id = cell.at(c_id);
    p.route_name = cell.at(c_name);
    p.distance_km = cell.number(c_dist);
    p.stop_count = static_cast<int>(cell.integer(c_stops));
    p.bus_count = static_cast<int>(cell.integer(c_buses));
    if (c_source >= 0) p.source = cell.at(static_cast<std::size_t>(c_source));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RouteProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FeedError(path.string(), 0, "cannot read route profile file");
  return read_profiles_csv(in, path.string());
}

void write_statistics_csv(std::ostream& out, const FeedStatistics& s) {
  out << kStatisticsHeader << '\n'
      << s.route_count << ',' << format_number(s.distance_mean_km) << ',' << format_number(s.distance_sd_km) << ','
      << format_number(s.stops_mean) << ',' << format_number(s.stops_sd) << ',' << format_number(s.buses_mean) << ','
      << format_number(s.buses_sd) << '\n';
}

std::string format_statistics_table(const FeedStatistics& s) {
  std::ostringstream out;
  out << "Number of routes    " << s.route_count << '\n'
      << "Distance of routes  mean=" << format_fixed(s.distance_mean_km, 2) << " km  sd="
      << format_fixed(s.distance_sd_km, 2) << " km\n"
      << "Stops per route     mean=" << format_fixed(s.stops_mean, 2) << "  sd=" << format_fixed(s.stops_sd, 2) << '\n'
      << "Buses per route     mean=" << format_fixed(s.buses_mean, 2) << "  sd=" << format_fixed(s.buses_sd, 2)
      << '\n';
  return out.str();
}

}  // namespace dtnsim::gtfs
