#include <cmath>
#include <random>

#include "doctest.h"
#include "dtnsim/analytic.hpp"
#include "dtnsim/error.hpp"
#include "dtnsim/units.hpp"

using namespace dtnsim;
using namespace dtnsim::analytic;

namespace {

RouteCircle route15(std::vector<double> gateways = {10.0}) {
  RouteCircle r;
  r.route_id = "R";
  r.circumference_km = 15.0;
  for (double g : gateways) {
    r.gateway_positions.push_back({g});
    r.stops.push_back({g});
  }
  return r;
}

BusState bus_at(double p0, double v = 20.0) { return {"b", "R", {p0}, v}; }

}  // namespace

TEST_CASE("sensor to bus wait") {
  auto r = route15();
  CHECK(t_sb(r, bus_at(5.0), {5.0}, 0.0) == 0.0);
  CHECK(t_sb(r, bus_at(0.0), {5.0}, 0.0) == doctest::Approx(hours(0.25)));
  CHECK(t_sb(r, bus_at(10.0), {5.0}, 0.0) == doctest::Approx(hours(0.5)));
  try {
    t_sb(r, bus_at(0.0), {16.0}, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidPosition);
  }
}

TEST_CASE("bus to gateway carry") {
  auto r = route15({5.0, 10.0, 2.0});
  CHECK(t_bg(r, bus_at(0.0), {5.0}, {5.0}, 0.0) == 0.0);
  CHECK(t_bg(r, bus_at(0.0), {5.0}, {10.0}, 0.0) == doctest::Approx(hours(0.25)));
  CHECK(t_bg(r, bus_at(0.0), {5.0}, {2.0}, 0.0) == doctest::Approx(hours(0.6)));
  // nearest gateway ahead of 6 km is the one at 10 km
  CHECK(nearest_gateway_ahead(r, {6.0}).km == 10.0);
  CHECK(nearest_gateway_ahead(r, {11.0}).km == 2.0);
  CHECK(nearest_gateway_ahead(r, {5.0}).km == 5.0);
  auto bare = route15({});
  try {
    nearest_gateway_ahead(bare, {1.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingGateway);
  }
}

TEST_CASE("on-route total latency") {
  auto zero = t_d_on(route15({5.0}), bus_at(5.0), {5.0}, {5.0}, 0.0);
  CHECK(zero.t_d_on == 0.0);

  auto a = t_d_on(route15(), bus_at(0.0), {5.0}, {10.0}, 0.0);
  CHECK(a.t_sb == doctest::Approx(hours(0.25)));
  CHECK(a.t_bg == doctest::Approx(hours(0.25)));
  CHECK(a.t_d_on == doctest::Approx(hours(0.5)));

  auto b = t_d_on(route15({2.0}), bus_at(0.0), {5.0}, {2.0}, 0.0);
  CHECK(b.t_d_on == doctest::Approx(hours(0.85)));
}

TEST_CASE("several buses: the first to arrive carries") {
  auto r = route15();
  std::vector<BusState> buses{bus_at(0.0), bus_at(4.0)};
  auto d = t_d_on(r, std::span<const BusState>(buses), {5.0}, 0.0);
  CHECK(d.t_sb == doctest::Approx(hours(1.0 / 20.0)));
  CHECK(t_sb(r, std::span<const BusState>(buses), {5.0}, 0.0) == doctest::Approx(hours(0.05)));
}

TEST_CASE("upper bounds") {
  CHECK(max_t_d_on(route15(), bus_at(0.0)) == doctest::Approx(hours(1.5)));
  RouteCircle tiny{"T", 0.001, {{0.0}}, {{0.0}}, {}};
  CHECK(max_t_d_on(tiny, bus_at(0.0)) == doctest::Approx(hours(0.0001)));
  CHECK(max_t_d_off(0.0, 0.0, route15(), bus_at(0.0)) == doctest::Approx(hours(1.5)));
  CHECK(max_t_d_off(hours(4), hours(24), route15(), bus_at(0.0)) == doctest::Approx(hours(29.5)));
  CHECK(max_t_d_off(hours(5), hours(24), route15(), bus_at(0.0)) >=
        max_t_d_off(hours(4), hours(24), route15(), bus_at(0.0)));
}

TEST_CASE("off-route latency adds the pedestrian legs") {
  auto r = route15({10.0, 2.0});
  auto base = t_d_on(r, bus_at(0.0), {5.0}, {10.0}, 0.0);
  auto same = t_d_off(0.0, 0.0, r, bus_at(0.0), {5.0}, {10.0}, 0.0);
  CHECK(same.t_d_off == base.t_d_on);

  auto typical = t_d_off(hours(2), hours(12.5), r, bus_at(0.0), {5.0}, {10.0}, 0.0);
  CHECK(typical.t_d_off == doctest::Approx(hours(15.0)));

  auto hand = t_d_off(hours(1), hours(1), r, bus_at(0.0), {5.0}, {2.0}, 0.0);
  CHECK(hand.t_d_off == doctest::Approx(hours(2.85)));

  try {
    t_d_off(-1.0, 0.0, r, bus_at(0.0), {5.0}, {10.0}, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidParameter);
  }
}

namespace {

struct Instance {
  RouteCircle route;
  BusState bus;
  ArcPosition sensor;
  ArcPosition gateway;
  double t = 0.0;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cdist(0.01, 50.0), vdist(1.0, 80.0), u(0.0, 1.0), tdist(0.0, 1e6);
  Instance in;
  double c = cdist(rng);
  in.gateway = {u(rng) * c};
  in.route = {"R", c, {in.gateway}, {in.gateway}, {}};
  in.bus = {"b", "R", {u(rng) * c}, vdist(rng)};
  in.sensor = {u(rng) * c};
  in.t = tdist(rng);
  return in;
}

}  // namespace

TEST_CASE("property: components stay strictly below one loop") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 10000; ++n) {
    auto in = random_instance(rng);
    auto d = t_d_on(in.route, in.bus, in.sensor, in.gateway, in.t);
    const double loop = loop_time(in.bus, in.route.circumference_km);
    CHECK(d.t_sb >= 0.0);
    CHECK(d.t_bg >= 0.0);
    CHECK(d.t_sb < loop);
    CHECK(d.t_bg < loop);
    CHECK(d.t_d_on == d.t_sb + d.t_bg);
    CHECK(d.t_d_on < max_t_d_on(in.route, in.bus));
  }
}

TEST_CASE("property: rotating every position leaves latency unchanged") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    auto in = random_instance(rng);
    const double c = in.route.circumference_km;
    const double shift = u(rng) * c;
    auto rot = [&](ArcPosition p) { return ArcPosition{normalize_offset(p.km + shift, c)}; };
    Instance r = in;
    r.bus.initial_position = rot(in.bus.initial_position);
    r.sensor = rot(in.sensor);
    r.gateway = rot(in.gateway);
    r.route.gateway_positions = {r.gateway};
    r.route.stops = {r.gateway};
    auto a = t_d_on(in.route, in.bus, in.sensor, in.gateway, in.t);
    auto b = t_d_on(r.route, r.bus, r.sensor, r.gateway, r.t);
    // a rotated point can land a hair either side of a wrap
    const double tol = 1e-6 * hours(c / in.bus.velocity_kmh) + 1e-6;
    const double loop = loop_time(in.bus, c);
    auto close = [&](double x, double y) {
      double d = std::abs(x - y);
      return d <= tol || std::abs(d - loop) <= tol;
    };
    CHECK(close(a.t_sb, b.t_sb));
    CHECK(close(a.t_bg, b.t_bg));
  }
}

TEST_CASE("property: scaling C and v together leaves latency unchanged") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> kdist(0.1, 10.0);
  for (int n = 0; n < 2000; ++n) {
    auto in = random_instance(rng);
    const double k = kdist(rng);
    Instance s = in;
    s.route.circumference_km *= k;
    s.bus.velocity_kmh *= k;
    s.bus.initial_position.km *= k;
    s.sensor.km *= k;
    s.gateway.km *= k;
    s.route.gateway_positions = {s.gateway};
    s.route.stops = {s.gateway};
    if (s.bus.initial_position.km >= s.route.circumference_km || s.sensor.km >= s.route.circumference_km ||
        s.gateway.km >= s.route.circumference_km) {
      continue;
    }
    auto a = t_d_on(in.route, in.bus, in.sensor, in.gateway, in.t);
    auto b = t_d_on(s.route, s.bus, s.sensor, s.gateway, s.t);
    const double loop = loop_time(in.bus, in.route.circumference_km);
    const double tol = 1e-6 * loop + 1e-6;
    auto close = [&](double x, double y) {
      double d = std::abs(x - y);
      return d <= tol || std::abs(d - loop) <= tol;
    };
    CHECK(close(a.t_sb, b.t_sb));
    CHECK(close(a.t_bg, b.t_bg));
  }
}

TEST_CASE("property: zero pedestrian terms reduce to the on-route form") {
  std::mt19937_64 rng(24);
  for (int n = 0; n < 1000; ++n) {
    auto in = random_instance(rng);
    auto on = t_d_on(in.route, in.bus, in.sensor, in.gateway, in.t);
    auto off = t_d_off(0.0, 0.0, in.route, in.bus, in.sensor, in.gateway, in.t);
    CHECK(off.t_d_off == on.t_d_on);
    CHECK(off.t_sb == on.t_sb);
    CHECK(off.t_bg == on.t_bg);
  }
}
