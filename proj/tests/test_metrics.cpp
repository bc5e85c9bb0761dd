#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dtnsim/error.hpp"
#include "dtnsim/metrics.hpp"

using namespace dtnsim;
using namespace dtnsim::metrics;

namespace {

// One on-route sensor "S1" and one off-route sensor "P1".
SimulationResult synthetic(int generated, int delivered, std::uint64_t seed = 0, std::string hash = "h") {
  SimulationResult r;
  r.seed = seed;
  r.config_hash = std::move(hash);
  r.horizon_s = 3600.0;
  r.sensors = {{"S1", SensorKind::kOnRoute, "R"}, {"P1", SensorKind::kOffRoute, ""}};
  r.buses = {{"B", "R", 10.0, 20.0}};
  for (int i = 0; i < generated; ++i) {
    Message m;
    m.message_id = r.messages.size();
    m.sensor_index = 0;
    m.t_generated = 60.0 * i;
    if (i < delivered) {
      m.t_bus_board = m.t_generated + 600.0;
      m.t_delivered = m.t_generated + 1500.0;
      m.bus_index = 0;
      m.delivery_path = DeliveryPath::kSensorBusGateway;
      m.location = MessageLocation::kDelivered;
      ++r.delivered;
    } else {
      m.location = MessageLocation::kSensor;
      ++r.residual.in_sensors;
    }
    r.messages.push_back(m);
  }
  return r;
}

}  // namespace

TEST_CASE("per-sensor delivery rates") {
  CHECK(*delivery_rate("S1", synthetic(10, 10)) == doctest::Approx(1.0));
  CHECK(*delivery_rate("S1", synthetic(10, 4)) == doctest::Approx(0.4));
  CHECK_FALSE(delivery_rate("P1", synthetic(10, 4)).has_value());
  try {
    delivery_rate("nope", synthetic(1, 1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLookup);
  }
}

TEST_CASE("quantiles use linear interpolation") {
  auto one = summarize({600.0});
  REQUIRE(one);
  CHECK(one->median == 600.0);
  CHECK(one->min == 600.0);
  CHECK(one->max == 600.0);
  CHECK(one->n == 1);
  CHECK_FALSE(summarize({}).has_value());
  auto q = summarize({4.0, 1.0, 3.0, 2.0});
  REQUIRE(q);
  CHECK(q->q1 == doctest::Approx(1.75));
  CHECK(q->median == doctest::Approx(2.5));
  CHECK(q->q3 == doctest::Approx(3.25));
  CHECK(q->mean == doctest::Approx(2.5));
  std::vector<double> v{10.0, 20.0, 30.0};
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(15.0));
}

TEST_CASE("property: quantiles are ordered and bracketed") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> xs(1 + g() % 50);
    for (auto& x : xs) x = u(g);
    auto q = summarize(xs);
    REQUIRE(q);
    CHECK(q->min <= q->q1);
    CHECK(q->q1 <= q->median);
    CHECK(q->median <= q->q3);
    CHECK(q->q3 <= q->max);
    CHECK(q->min == *std::min_element(xs.begin(), xs.end()));
    CHECK(q->max == *std::max_element(xs.begin(), xs.end()));
    CHECK(q->mean >= q->min - 1e-9);
    CHECK(q->mean <= q->max + 1e-9);
  }
}

TEST_CASE("stage samples come from delivered messages") {
  auto r = synthetic(10, 4);
  auto s2b = stage_delays(r, Stage::kSensorToBus, SensorKind::kOnRoute);
  CHECK(s2b.values.size() == 4);
  REQUIRE(s2b.quantiles);
  CHECK(s2b.quantiles->median == 600.0);
  auto total = stage_delays(r, Stage::kTotal);
  CHECK(total.quantiles->median == 1500.0);
  CHECK(stage_delays(r, Stage::kSensorToPedestrian).values.empty());
  CHECK_FALSE(stage_delays(r, Stage::kSensorToPedestrian).quantiles);
}

TEST_CASE("report series and histograms") {
  auto rep = build_report(synthetic(10, 4, 3));
  CHECK(rep.metadata.seeds == std::vector<std::uint64_t>{3});
  CHECK(rep.series("onroute.bus_to_gateway").quantiles->median == 900.0);
  CHECK_FALSE(rep.series("offroute.total").quantiles);
  CHECK_THROWS_AS(rep.series("bogus"), Error);
  REQUIRE(rep.histograms.size() == 2);
  CHECK(rep.histograms[0].counts.size() == 20);
  CHECK(rep.histograms[0].total() == 1);
  CHECK(rep.histograms[1].total() == 0);
  CHECK(rep.sensor("S1").rate == doctest::Approx(0.4));
  CHECK(rep.seed_rates(SensorKind::kOnRoute) == std::vector<double>{0.4});
}

TEST_CASE("histogram bins") {
  std::vector<double> rates{0.0, 0.05, 0.5, 0.999, 1.0};
  auto h = histogram(SensorKind::kOnRoute, rates, 20);
  CHECK(h.total() == 5);
  CHECK(h.counts[0] == 1);
  CHECK(h.counts[1] == 1);
  CHECK(h.counts[10] == 1);
  CHECK(h.counts[19] == 2);
  auto h4 = histogram(SensorKind::kOnRoute, rates, 4);
  CHECK(h4.counts.size() == 4);
  CHECK(h4.total() == 5);
}

TEST_CASE("aggregation pools seeds") {
  std::vector<MetricsReport> one{build_report(synthetic(10, 4))};
  auto same = aggregate_runs(one);
  CHECK(same.sensor("S1").rate == one[0].sensor("S1").rate);
  CHECK(same.series("onroute.total").samples == one[0].series("onroute.total").samples);
  CHECK(same.histograms == one[0].histograms);

  std::vector<MetricsReport> two{build_report(synthetic(10, 4, 0)), build_report(synthetic(10, 6, 1))};
  auto agg = aggregate_runs(two);
  CHECK(*agg.sensor("S1").rate == doctest::Approx(0.5));
  CHECK(agg.sensor("S1").generated == 20);
  CHECK(agg.sensor("S1").delivered == 10);
  CHECK(agg.sensor("S1").per_seed.size() == 2);
  CHECK(agg.series("onroute.total").samples.size() == 10);
  CHECK(agg.metadata.seeds == std::vector<std::uint64_t>{0, 1});
  CHECK(agg.seed_rates(SensorKind::kOnRoute).size() == 2);

  std::vector<MetricsReport> mixed{build_report(synthetic(10, 4, 0, "a")), build_report(synthetic(10, 4, 1, "b"))};
  try {
    aggregate_runs(mixed);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAggregation);
  }
  CHECK_THROWS_AS(aggregate_runs(std::span<const MetricsReport>{}), Error);
}

TEST_CASE("CSV exports follow the fixed schema") {
  auto r = synthetic(3, 1);
  auto rep = build_report(r);
  auto first_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  std::ostringstream msgs, rates, by_seed, stages, hist;
  write_messages_csv(msgs, r);
  write_sensor_rates_csv(rates, rep);
  write_sensor_rates_by_seed_csv(by_seed, rep);
  write_stage_quantiles_csv(stages, rep);
  write_histogram_csv(hist, rep);
  CHECK(first_line(msgs.str()) == kMessagesHeader);
  CHECK(first_line(rates.str()) == kSensorRatesHeader);
  CHECK(first_line(by_seed.str()) == kSensorRatesBySeedHeader);
  CHECK(first_line(stages.str()) == kStageQuantilesHeader);
  CHECK(first_line(hist.str()) == kHistogramHeader);
  CHECK(msgs.str().find("0,S1,onroute,0.000000,,600.000000,1500.000000,") != std::string::npos);
  CHECK(rates.str().find("P1,offroute,0,0,NA") != std::string::npos);
  CHECK(rates.str().find("S1,onroute,3,1,0.333333") != std::string::npos);
  auto json = summary_json(rep, "0.1.0");
  CHECK(json.find("\"config_hash\"") != std::string::npos);
}
