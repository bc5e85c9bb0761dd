#include <cmath>
#include <random>

#include "doctest.h"
#include "dtnsim/error.hpp"
#include "dtnsim/geometry.hpp"
#include "dtnsim/units.hpp"
#include "oracles/crossing_oracle.hpp"

using namespace dtnsim;

namespace {

BusState bus_at(double p0, double v) { return {"b", "r", {p0}, v}; }

}  // namespace

TEST_CASE("arc distance follows the direction of travel") {
  CHECK(arc_distance({5.0}, {5.0}, 15.0) == 0.0);
  CHECK(arc_distance({0.0}, {7.5}, 15.0) == doctest::Approx(7.5));
  // (2 - 10) mod 15
  CHECK(arc_distance({10.0}, {2.0}, 15.0) == doctest::Approx(7.0));
}

TEST_CASE("non-positive circumference is an invalid route") {
  for (double c : {0.0, -1.0, std::nan("")}) {
    try {
      arc_distance({0.0}, {1.0}, c);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidRoute);
    }
  }
}

TEST_CASE("normalize snaps values within tolerance of C to zero") {
  CHECK(normalize_offset(15.0 - 1e-10, 15.0) == 0.0);
  CHECK(normalize_offset(-1e-10, 15.0) == 0.0);
  CHECK(normalize_offset(-2.0, 15.0) == doctest::Approx(13.0));
  CHECK(normalize_offset(31.0, 15.0) == doctest::Approx(1.0));
}

TEST_CASE("bus position is linear motion modulo C") {
  CHECK(bus_position_at(bus_at(0.0, 20.0), hours(0.5), 15.0).km == doctest::Approx(10.0));
  CHECK(bus_position_at(bus_at(10.0, 20.0), hours(0.5), 15.0).km == doctest::Approx(5.0));
  CHECK(bus_position_at(bus_at(0.0, 20.0), hours(0.75), 15.0).km == 0.0);
  CHECK_THROWS_AS(bus_position_at(bus_at(0.0, 20.0), -1.0, 15.0), Error);
  try {
    bus_position_at(bus_at(0.0, 20.0), -1.0, 15.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidTime);
  }
}

TEST_CASE("next crossing time") {
  CHECK(next_crossing_time(bus_at(0.0, 15.0), {7.5}, 0.0, 15.0) == doctest::Approx(hours(0.5)));
  CHECK(next_crossing_time(bus_at(7.5, 15.0), {7.5}, 0.0, 15.0) == 0.0);
  // at 0.1 h the bus is at 12; 8 km to go at 20 km/h
  CHECK(next_crossing_time(bus_at(10.0, 20.0), {5.0}, hours(0.1), 15.0) == doctest::Approx(hours(0.5)));
}

TEST_CASE("crossing time on lap counts whole loops from the start") {
  auto b = bus_at(10.0, 20.0);
  CHECK(crossing_time_on_lap(b, {5.0}, 0, 15.0) == doctest::Approx(hours(10.0 / 20.0)));
  CHECK(crossing_time_on_lap(b, {5.0}, 3, 15.0) == doctest::Approx(hours(55.0 / 20.0)));
  CHECK(loop_time(b, 15.0) == doctest::Approx(hours(0.75)));
}

TEST_CASE("even phase offsets") {
  auto offs = even_phase_offsets(3, 15.0);
  REQUIRE(offs.size() == 3);
  CHECK(offs[0].km == 0.0);
  CHECK(offs[1].km == doctest::Approx(5.0));
  CHECK(offs[2].km == doctest::Approx(10.0));
  CHECK(even_phase_offsets(1, 15.0).front().km == 0.0);
}

TEST_CASE("route validation") {
  RouteCircle r{"R", 15.0, {{0.0}, {5.0}}, {{5.0}}, {{3.0}}};
  CHECK_NOTHROW(validate_route(r));
  auto no_gateway = r;
  no_gateway.gateway_positions.clear();
  try {
    validate_route(no_gateway);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingGateway);
  }
  auto off_circle = r;
  off_circle.onroute_sensor_positions = {{15.0}};
  CHECK_THROWS_AS(validate_route(off_circle), Error);
  auto stray_gateway = r;
  stray_gateway.gateway_positions = {{7.0}};
  CHECK_THROWS_AS(validate_route(stray_gateway), Error);
}

TEST_CASE("property: arc distances are complementary on a rational grid") {
  // C = 12 with positions on a 1/8 km grid: every value is exact in binary
  const double c = 12.0;
  int cases = 0;
  for (int i = 0; i < 96; ++i) {
    for (int j = 0; j < 96; ++j) {
      ArcPosition a{i / 8.0};
      ArcPosition b{j / 8.0};
      double ab = arc_distance(a, b, c);
      double ba = arc_distance(b, a, c);
      CHECK_GE(ab, 0.0);
      CHECK_LT(ab, c);
      if (i == j) {
        CHECK(ab == 0.0);
      } else {
        CHECK(ab + ba == c);
      }
      ++cases;
    }
  }
  CHECK(cases >= 1000);
}

TEST_CASE("property: position is periodic in C/v") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> cdist(0.5, 40.0), vdist(5.0, 60.0), u(0.0, 1.0), tdist(0.0, 200000.0);
  for (int n = 0; n < 2000; ++n) {
    double c = cdist(rng);
    auto b = bus_at(u(rng) * c, vdist(rng));
    double t = tdist(rng);
    auto p1 = bus_position_at(b, t, c);
    auto p2 = bus_position_at(b, t + loop_time(b, c), c);
    CHECK(circular_gap(p1, p2, c) < 1e-9);
  }
}

TEST_CASE("property: next crossing lands on the target within one loop") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> cdist(0.5, 40.0), vdist(5.0, 60.0), u(0.0, 1.0), tdist(0.0, 200000.0);
  for (int n = 0; n < 2000; ++n) {
    double c = cdist(rng);
    auto b = bus_at(u(rng) * c, vdist(rng));
    ArcPosition target{u(rng) * c};
    double from = tdist(rng);
    double t = next_crossing_time(b, target, from, c);
    CHECK(t >= from);
    CHECK(t < from + loop_time(b, c));
    CHECK(circular_gap(bus_position_at(b, t, c), target, c) < 1e-9);
  }
}

TEST_CASE("property: next crossing agrees with a stepped search within one step") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> cdist(0.5, 20.0), vdist(10.0, 40.0), u(0.0, 1.0), tdist(0.0, 10000.0);
  const double step = 0.1;
  for (int n = 0; n < 1000; ++n) {
    double c = cdist(rng);
    auto b = bus_at(u(rng) * c, vdist(rng));
    ArcPosition target{u(rng) * c};
    double from = tdist(rng);
    double exact = next_crossing_time(b, target, from, c);
    double stepped = oracle::stepped_next_crossing(b.initial_position.km, b.velocity_kmh, target.km, c, from, step);
    CHECK(std::abs(stepped - exact) <= step + 1e-6);
  }
}
