#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "dtnsim/config.hpp"
#include "dtnsim/error.hpp"
#include "dtnsim/units.hpp"

using namespace dtnsim;

TEST_CASE("unit suffixes") {
  CHECK(parse_length("15km") == 15.0);
  CHECK(parse_length("750m") == doctest::Approx(0.75));
  CHECK(parse_duration("30min") == 1800.0);
  CHECK(parse_duration("2h") == 7200.0);
  CHECK(parse_duration("1d") == 86400.0);
  CHECK(parse_duration("45s") == 45.0);
  CHECK(parse_speed("20km/h") == 20.0);
  CHECK(parse_speed("5m/s") == doctest::Approx(18.0));
  CHECK(parse_number("72.6") == 72.6);
  CHECK(parse_integer("-3") == -3);
  CHECK(parse_bool("true"));
  CHECK_FALSE(parse_bool("off"));
}

TEST_CASE("bad units are rejected") {
  for (const char* bad : {"15", "15 furlongs", "km", "", "1.5.2km"}) {
    try {
      parse_length(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidParameter);
    }
  }
  CHECK_THROWS_AS(parse_duration("2hours"), Error);
  CHECK_THROWS_AS(parse_speed("20"), Error);
  CHECK_THROWS_AS(parse_integer("2.5"), Error);
  CHECK_THROWS_AS(parse_bool("maybe"), Error);
}

TEST_CASE("ranges borrow the unit of the upper bound") {
  auto v = parse_range("17.47..21.47km/h", Quantity::kSpeed);
  CHECK(v.lo == 17.47);
  CHECK(v.hi == 21.47);
  auto p = parse_range("10min..2h", Quantity::kDuration);
  CHECK(p.lo == 600.0);
  CHECK(p.hi == 7200.0);
  auto single = parse_range("3km", Quantity::kLength);
  CHECK(single.lo == single.hi);
  CHECK(parse_int_range("2..8") == IntRange{2, 8});
  CHECK(parse_int_range("4") == IntRange{4, 4});
  CHECK_THROWS_AS(parse_int_range("8..2"), Error);
}

TEST_CASE("formatting") {
  CHECK(format_duration(7200.0) == "2h");
  CHECK(format_duration(600.0) == "10min");
  CHECK(format_duration(12.5) == "12.5s");
  CHECK(format_length(15.0) == "15km");
  CHECK(format_fixed(0.5, 3) == "0.500");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("property: duration formatting round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 1e6);
  for (int i = 0; i < 1000; ++i) {
    double s = d(rng);
    CHECK(parse_duration(format_duration(s)) == s);
    double whole = std::floor(s);
    CHECK(parse_duration(format_duration(whole)) == doctest::Approx(whole).epsilon(1e-15));
  }
}

TEST_CASE("config defaults describe the reference experiment") {
  ScenarioConfig c;
  CHECK(c.num_routes == 32);
  CHECK(c.num_offroute_sensors == 100);
  CHECK(c.duration_s == hours(48));
  CHECK(c.stops_sigma() == doctest::Approx(std::sqrt(52.44)));
  CHECK(c.circumference_sigma_km() == 7.0);
  CHECK(c.pedestrian_arrival_sigma_s() == minutes(30));
  CHECK(c.effective_p_pedestrian_gateway() == doctest::Approx(2.0 / 72.6));
  CHECK_NOTHROW(validate_config(c));

  c.spread_is_variance = true;
  CHECK(c.circumference_sigma_km() == doctest::Approx(std::sqrt(7.0)));
  CHECK(c.pedestrian_arrival_sigma_s() == doctest::Approx(minutes(std::sqrt(30.0))));
}

TEST_CASE("config text parsing") {
  auto c = parse_config(R"(
# small world
seed = 7
duration = 6h        # horizon
num_routes = 3
bus_velocity = 15..25km/h
pedestrian_to_bus = exponential(mean=2h)
p_pedestrian_gateway = 0.25
)");
  CHECK(c.seed == 7);
  CHECK(c.duration_s == hours(6));
  CHECK(c.num_routes == 3);
  CHECK(c.bus_velocity_kmh == RealRange{15.0, 25.0});
  CHECK(c.pedestrian_to_bus == DelayDistribution::exponential(hours(2)));
  CHECK(c.p_pedestrian_gateway == 0.25);
}

TEST_CASE("config errors name the field") {
  try {
    parse_config("num_routes = 3\nbogus = 1\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "bogus");
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("gateways_per_route") != std::string::npos);
  }
  try {
    parse_config("duration = 6 parsecs\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "duration");
  }
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
}

TEST_CASE("inconsistent configs are rejected with the field name") {
  ScenarioConfig c;
  c.gateways_per_route = {1, 3};
  c.stops_min = 2;
  try {
    validate_config(c);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "gateways_per_route");
  }
  ScenarioConfig p;
  p.p_pedestrian_gateway = 1.5;
  CHECK_THROWS_AS(validate_config(p), ConfigError);
  ScenarioConfig v;
  v.bus_velocity_kmh = {0.0, 10.0};
  CHECK_THROWS_AS(validate_config(v), ConfigError);
}

TEST_CASE("serialized configs parse back to the same config") {
  ScenarioConfig c;
  c.seed = 3;
  c.pedestrian_to_bus = DelayDistribution::uniform(hours(1), hours(3));
  c.p_pedestrian_gateway = 0.1;
  c.spread_is_variance = true;
  auto text = serialize_config(c);
  CHECK(parse_config(text) == c);
  CHECK(parse_config(serialize_config(ScenarioConfig{})) == ScenarioConfig{});
}

TEST_CASE("config hash ignores the seed only") {
  ScenarioConfig a;
  ScenarioConfig b;
  b.seed = 99;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.num_routes = 31;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("distribution specs") {
  auto d = DelayDistribution::parse("lognormal(median=12.5h, sigma=1.2)");
  CHECK(d == DelayDistribution::lognormal(hours(12.5), 1.2));
  CHECK(d.median() == hours(12.5));
  CHECK(DelayDistribution::parse("1h") == DelayDistribution::constant(3600.0));
  CHECK(DelayDistribution::parse("uniform(1h..3h)") == DelayDistribution::uniform(3600.0, 10800.0));
  CHECK(DelayDistribution::parse(d.to_string()) == d);
  CHECK_THROWS_AS(DelayDistribution::parse("gamma(k=2)"), Error);
  CHECK_THROWS_AS(DelayDistribution::parse("exponential(mean=-1h)"), Error);
}

TEST_CASE("config files load from disk") {
  auto path = std::filesystem::temp_directory_path() / "dtnsim_test_config.txt";
  {
    std::ofstream out(path);
    out << "num_routes = 4\nduration = 12h\n";
  }
  auto c = load_config_file(path);
  CHECK(c.num_routes == 4);
  CHECK(c.duration_s == hours(12));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config_file(path), ConfigError);
}
