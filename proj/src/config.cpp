#include "dtnsim/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "dtnsim/error.hpp"

namespace dtnsim {
namespace {

struct Field {
  const char* key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

int to_int(std::string_view v) { return static_cast<int>(parse_integer(v)); }

std::string int_range(const IntRange& r) {
  return std::to_string(r.lo) + ".." + std::to_string(r.hi);
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"seed", [](ScenarioConfig& c, std::string_view v) { c.seed = static_cast<std::uint64_t>(parse_integer(v)); },
       [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      {"duration", [](ScenarioConfig& c, std::string_view v) { c.duration_s = parse_duration(v); },
       [](const ScenarioConfig& c) { return format_duration(c.duration_s); }},
      {"num_routes", [](ScenarioConfig& c, std::string_view v) { c.num_routes = to_int(v); },
       [](const ScenarioConfig& c) { return std::to_string(c.num_routes); }},
      {"onroute_sensors_per_route",
       [](ScenarioConfig& c, std::string_view v) { c.onroute_sensors_per_route = parse_int_range(v); },
       [](const ScenarioConfig& c) { return int_range(c.onroute_sensors_per_route); }},
      {"gateways_per_route", [](ScenarioConfig& c, std::string_view v) { c.gateways_per_route = parse_int_range(v); },
       [](const ScenarioConfig& c) { return int_range(c.gateways_per_route); }},
      {"buses_per_route", [](ScenarioConfig& c, std::string_view v) { c.buses_per_route = parse_int_range(v); },
       [](const ScenarioConfig& c) { return int_range(c.buses_per_route); }},
      {"stops_mean", [](ScenarioConfig& c, std::string_view v) { c.stops_mean = parse_number(v); },
       [](const ScenarioConfig& c) { return format_number(c.stops_mean); }},
      {"stops_variance", [](ScenarioConfig& c, std::string_view v) { c.stops_variance = parse_number(v); },
       [](const ScenarioConfig& c) { return format_number(c.stops_variance); }},
      {"stops_min", [](ScenarioConfig& c, std::string_view v) { c.stops_min = to_int(v); },
       [](const ScenarioConfig& c) { return std::to_string(c.stops_min); }},
      {"bus_velocity",
       [](ScenarioConfig& c, std::string_view v) {
         auto r = parse_range(v, Quantity::kSpeed);
         c.bus_velocity_kmh = r;
       },
       [](const ScenarioConfig& c) {
         return format_number(c.bus_velocity_kmh.lo) + ".." + format_speed(c.bus_velocity_kmh.hi);
       }},
      {"generation_period",
       [](ScenarioConfig& c, std::string_view v) { c.generation_period_s = parse_range(v, Quantity::kDuration); },
       [](const ScenarioConfig& c) {
         return format_duration(c.generation_period_s.lo) + ".." + format_duration(c.generation_period_s.hi);
       }},
      {"num_offroute_sensors", [](ScenarioConfig& c, std::string_view v) { c.num_offroute_sensors = to_int(v); },
       [](const ScenarioConfig& c) { return std::to_string(c.num_offroute_sensors); }},
      {"circumference_mean", [](ScenarioConfig& c, std::string_view v) { c.circumference_mean_km = parse_length(v); },
       [](const ScenarioConfig& c) { return format_length(c.circumference_mean_km); }},
      {"circumference_spread",
       [](ScenarioConfig& c, std::string_view v) { c.circumference_spread_km = parse_length(v); },
       [](const ScenarioConfig& c) { return format_length(c.circumference_spread_km); }},
      {"pedestrian_arrival_mean",
       [](ScenarioConfig& c, std::string_view v) { c.pedestrian_arrival_mean_s = parse_duration(v); },
       [](const ScenarioConfig& c) { return format_duration(c.pedestrian_arrival_mean_s); }},
      {"pedestrian_arrival_spread",
       [](ScenarioConfig& c, std::string_view v) { c.pedestrian_arrival_spread_s = parse_duration(v); },
       [](const ScenarioConfig& c) { return format_duration(c.pedestrian_arrival_spread_s); }},
      {"spread_is_variance", [](ScenarioConfig& c, std::string_view v) { c.spread_is_variance = parse_bool(v); },
       [](const ScenarioConfig& c) { return std::string(c.spread_is_variance ? "true" : "false"); }},
      {"pedestrian_to_bus",
       [](ScenarioConfig& c, std::string_view v) { c.pedestrian_to_bus = DelayDistribution::parse(v); },
       [](const ScenarioConfig& c) { return c.pedestrian_to_bus.to_string(); }},
      {"p_pedestrian_gateway",
       [](ScenarioConfig& c, std::string_view v) {
         if (v == "auto") {
           c.p_pedestrian_gateway.reset();
         } else {
           c.p_pedestrian_gateway = parse_number(v);
         }
       },
       [](const ScenarioConfig& c) {
         return c.p_pedestrian_gateway ? format_number(*c.p_pedestrian_gateway) : std::string("auto");
       }},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const auto& f : fields()) {
    if (key == f.key) {
      try {
        f.set(config, value);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError(std::string(key), e.what());
      }
      return;
    }
  }
  std::string valid;
  for (const auto& f : fields()) {
    if (!valid.empty()) valid += ", ";
    valid += f.key;
  }
  throw ConfigError(std::string(key), "unknown field; valid fields are: " + valid);
}

ScenarioConfig parse_config(std::string_view text, ScenarioConfig base) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    try {
      apply_setting(base, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2) + " (line " +
                                       std::to_string(line_no) + ")");
    }
  }
  return base;
}

ScenarioConfig load_config_file(const std::filesystem::path& path, ScenarioConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string serialize_config(const ScenarioConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

std::string config_hash(const ScenarioConfig& config) {
  ScenarioConfig unseeded = config;
  unseeded.seed = 0;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_config(unseeded))));
  return buf;
}

}  // namespace dtnsim
