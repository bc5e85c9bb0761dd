#include "dtnsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "dtnsim/error.hpp"
#include "dtnsim/units.hpp"

namespace dtnsim {

const char* to_string(DeliveryPath path) {
  switch (path) {
    case DeliveryPath::kSensorBusGateway: return "sensor-bus-gateway";
    case DeliveryPath::kSensorPedestrianBusGateway: return "sensor-pedestrian-bus-gateway";
    case DeliveryPath::kSensorPedestrianGateway: return "sensor-pedestrian-gateway";
  }
  return "unknown";
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kGenerate: return "generate";
    case EventKind::kPedestrianArrival: return "pedestrian-arrival";
    case EventKind::kPedestrianHandoff: return "pedestrian-handoff";
    case EventKind::kPedestrianBoard: return "pedestrian-board";
    case EventKind::kBusAtPoint: return "bus-at-point";
  }
  return "unknown";
}

bool Event::runs_before(const Event& other) const {
  if (timestamp != other.timestamp) return timestamp < other.timestamp;
  if (kind != other.kind) return kind < other.kind;
  return sequence < other.sequence;
}

// ---------------------------------------------------------------------------
// Handlers

TransferRecord handle_bus_sensor_contact(std::vector<MessageId>& sensor_buffer,
                                         std::vector<MessageId>& bus_buffer, std::vector<Message>& messages,
                                         std::uint32_t bus_index, double t) {
  TransferRecord record{t, sensor_buffer.size()};
  for (MessageId id : sensor_buffer) {
    auto& m = messages[id];
    m.t_bus_board = t;
    m.bus_index = bus_index;
    m.location = MessageLocation::kBus;
    bus_buffer.push_back(id);
  }
  sensor_buffer.clear();
  return record;
}

DeliveryRecord handle_bus_gateway_contact(std::vector<MessageId>& bus_buffer, std::vector<Message>& messages,
                                          double t) {
  DeliveryRecord record{t, {}};
  record.delivered.reserve(bus_buffer.size());
  for (MessageId id : bus_buffer) {
    auto& m = messages[id];
    m.t_delivered = t;
    m.location = MessageLocation::kDelivered;
    m.delivery_path = m.kind == SensorKind::kOnRoute ? DeliveryPath::kSensorBusGateway
                                                     : DeliveryPath::kSensorPedestrianBusGateway;
    record.delivered.push_back(id);
  }
  bus_buffer.clear();
  return record;
}

double draw_pedestrian_gap(RandomStream& rng, const SensorSpec& sensor) {
  return rng.truncated_normal_above(sensor.pedestrian_arrival_mean_s, sensor.pedestrian_arrival_sd_s, 0.0);
}

PedestrianDraw draw_pedestrian(RandomStream& rng, const Scenario& scenario) {
  PedestrianDraw d;
  d.t_pb = scenario.pedestrians.to_bus.sample(rng);
  d.direct_to_gateway = rng.bernoulli(scenario.pedestrians.p_gateway);
  d.bus_index = static_cast<std::uint32_t>(rng.uniform_int(0, static_cast<long long>(scenario.buses.size()) - 1));
  const auto& route = scenario.route(scenario.buses[d.bus_index].route_id);
  d.stop_index = static_cast<std::uint32_t>(rng.uniform_int(0, static_cast<long long>(route.stops.size()) - 1));
  return d;
}

RandomStream pedestrian_stream(const Scenario& scenario, std::size_t offroute_index) {
  return RandomStream(scenario.seed, "pedestrian", offroute_index);
}

PedestrianBatch handle_pedestrian_cycle(std::vector<MessageId>& sensor_buffer, std::vector<Message>& messages,
                                        const PedestrianDraw& draw, double t) {
  PedestrianBatch batch;
  batch.t_pickup = t;
  batch.draw = draw;
  batch.messages = std::move(sensor_buffer);
  sensor_buffer.clear();
  for (MessageId id : batch.messages) {
    auto& m = messages[id];
    m.t_pedestrian_pickup = t;
    m.location = MessageLocation::kPedestrian;
  }
  return batch;
}

DeliveryRecord handle_pedestrian_gateway(PedestrianBatch& batch, std::vector<Message>& messages, double t) {
  DeliveryRecord record{t, {}};
  for (MessageId id : batch.messages) {
    auto& m = messages[id];
    m.t_delivered = t;
    m.location = MessageLocation::kDelivered;
    m.delivery_path = DeliveryPath::kSensorPedestrianGateway;
    record.delivered.push_back(id);
  }
  batch.messages.clear();
  return record;
}

TransferRecord handle_pedestrian_board(PedestrianBatch& batch, std::vector<MessageId>& bus_buffer,
                                       std::vector<Message>& messages, std::uint32_t bus_index, double t) {
  TransferRecord record{t, batch.messages.size()};
  for (MessageId id : batch.messages) {
    auto& m = messages[id];
    m.t_bus_board = t;
    m.bus_index = bus_index;
    m.location = MessageLocation::kBus;
    bus_buffer.push_back(id);
  }
  batch.messages.clear();
  return record;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

struct Point {
  ArcPosition position;
  std::vector<std::uint32_t> sensors;
  bool gateway = false;
};

struct RouteRuntime {
  const RouteCircle* route = nullptr;
  std::vector<Point> points;  ///< sorted by position
};

struct BusRuntime {
  const BusState* bus = nullptr;
  std::uint32_t route = 0;
  std::vector<std::uint32_t> visit_order;  ///< point indices by distance ahead of the start
  std::vector<MessageId> buffer;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const { return b.runs_before(a); }
};

class Simulator {
 public:
  Simulator(const Scenario& scenario, double horizon_s, const RunOptions& options)
      : scenario_(scenario), horizon_(horizon_s), options_(options) {
    index_world();
  }

  SimulationResult run() {
    seed_events();
    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      if (options_.record_trace) {
        result_.trace.push_back({e.timestamp, e.sequence, e.kind, e.subject, e.point});
      }
      dispatch(e);
    }
    finish();
    return std::move(result_);
  }

 private:
  void index_world() {
    result_.seed = scenario_.seed;
    result_.config_hash = scenario_.config_hash;
    result_.horizon_s = horizon_;
    result_.summary = scenario_.summary();

    std::map<std::string, std::uint32_t, std::less<>> route_index;
    for (const auto& r : scenario_.routes) {
      route_index.emplace(r.route_id, static_cast<std::uint32_t>(routes_.size()));
      RouteRuntime rt;
      rt.route = &r;
      routes_.push_back(std::move(rt));
    }

    for (const auto& s : scenario_.onroute_sensors) {
      result_.sensors.push_back({s.sensor_id, s.kind, s.route_id});
      sensor_specs_.push_back(&s);
    }
    for (const auto& s : scenario_.offroute_sensors) {
      result_.sensors.push_back({s.sensor_id, s.kind, {}});
      sensor_specs_.push_back(&s);
    }
    sensor_buffers_.resize(sensor_specs_.size());

    // Interest points: sensor and gateway positions, merged when co-located.
    for (std::uint32_t i = 0; i < scenario_.onroute_sensors.size(); ++i) {
      const auto& s = scenario_.onroute_sensors[i];
      point_at(routes_[route_index.at(s.route_id)], s.position).sensors.push_back(i);
    }
    for (auto& rt : routes_) {
      for (auto g : rt.route->gateway_positions) point_at(rt, g).gateway = true;
    }

    for (const auto& b : scenario_.buses) {
      BusRuntime br;
      br.bus = &b;
      br.route = route_index.at(b.route_id);
      const auto& rt = routes_[br.route];
      const double c = rt.route->circumference_km;
      br.visit_order.resize(rt.points.size());
      for (std::uint32_t i = 0; i < br.visit_order.size(); ++i) br.visit_order[i] = i;
      std::stable_sort(br.visit_order.begin(), br.visit_order.end(), [&](std::uint32_t x, std::uint32_t y) {
        return arc_distance(b.initial_position, rt.points[x].position, c) <
               arc_distance(b.initial_position, rt.points[y].position, c);
      });
      result_.buses.push_back({b.bus_id, b.route_id, c, b.velocity_kmh});
      buses_.push_back(std::move(br));
    }
  }

  static Point& point_at(RouteRuntime& rt, ArcPosition p) {
    auto it = std::lower_bound(rt.points.begin(), rt.points.end(), p,
                               [](const Point& pt, ArcPosition x) { return pt.position < x; });
    if (it == rt.points.end() || it->position != p) it = rt.points.insert(it, Point{p, {}, false});
    return *it;
  }

  void push(Event e) {
    e.sequence = next_sequence_++;
    queue_.push(e);
  }

  void schedule_generation(std::uint32_t sensor, long long k) {
    const auto* s = sensor_specs_[sensor];
    double t = s->generation_phase_s + static_cast<double>(k) * s->generation_period_s;
    if (t < horizon_) push({t, 0, EventKind::kGenerate, sensor, 0, k});
  }

  void schedule_bus(std::uint32_t bus, std::uint32_t order, long long lap) {
    const auto& br = buses_[bus];
    if (br.visit_order.empty()) return;
    if (order >= br.visit_order.size()) {
      order = 0;
      ++lap;
    }
    const auto& rt = routes_[br.route];
    const auto& point = rt.points[br.visit_order[order]];
    double t = crossing_time_on_lap(*br.bus, point.position, lap, rt.route->circumference_km);
    if (t <= horizon_) push({t, 0, EventKind::kBusAtPoint, bus, order, lap});
  }

  void schedule_pedestrian_arrival(std::uint32_t offroute, double t) {
    if (t <= horizon_) push({t, 0, EventKind::kPedestrianArrival, offroute, 0, 0});
  }

  void seed_events() {
    for (std::uint32_t s = 0; s < sensor_specs_.size(); ++s) schedule_generation(s, 0);
    for (std::uint32_t b = 0; b < buses_.size(); ++b) schedule_bus(b, 0, 0);
    pedestrian_rngs_.reserve(scenario_.offroute_sensors.size());
    for (std::uint32_t i = 0; i < scenario_.offroute_sensors.size(); ++i) {
      pedestrian_rngs_.push_back(pedestrian_stream(scenario_, i));
      schedule_pedestrian_arrival(i, draw_pedestrian_gap(pedestrian_rngs_.back(), scenario_.offroute_sensors[i]));
    }
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::kGenerate: on_generate(e); break;
      case EventKind::kPedestrianArrival: on_pedestrian_arrival(e); break;
      case EventKind::kPedestrianHandoff: on_pedestrian_handoff(e); break;
      case EventKind::kPedestrianBoard: on_pedestrian_board(e); break;
      case EventKind::kBusAtPoint: on_bus_at_point(e); break;
    }
  }

  void on_generate(const Event& e) {
    Message m;
    m.message_id = result_.messages.size();
    m.sensor_index = e.subject;
    m.kind = sensor_specs_[e.subject]->kind;
    m.t_generated = e.timestamp;
    sensor_buffers_[e.subject].push_back(m.message_id);
    result_.messages.push_back(m);
    schedule_generation(e.subject, e.lap + 1);
  }

  void on_bus_at_point(const Event& e) {
    auto& br = buses_[e.subject];
    const auto& point = routes_[br.route].points[br.visit_order[e.point]];
    for (auto s : point.sensors) {
      handle_bus_sensor_contact(sensor_buffers_[s], br.buffer, result_.messages, e.subject, e.timestamp);
    }
    if (point.gateway) handle_bus_gateway_contact(br.buffer, result_.messages, e.timestamp);
    schedule_bus(e.subject, e.point + 1, e.lap);
  }

  void on_pedestrian_arrival(const Event& e) {
    const auto sensor = static_cast<std::uint32_t>(scenario_.onroute_sensors.size()) + e.subject;
    auto& rng = pedestrian_rngs_[e.subject];
    auto draw = draw_pedestrian(rng, scenario_);
    if (!sensor_buffers_[sensor].empty()) {
      auto batch = handle_pedestrian_cycle(sensor_buffers_[sensor], result_.messages, draw, e.timestamp);
      auto id = static_cast<std::uint32_t>(pedestrians_.size());
      pedestrians_.push_back(std::move(batch));
      double t = e.timestamp + draw.t_pb;
      if (t <= horizon_) push({t, 0, EventKind::kPedestrianHandoff, id, 0, 0});
    }
    schedule_pedestrian_arrival(e.subject, e.timestamp + draw_pedestrian_gap(rng, scenario_.offroute_sensors[e.subject]));
  }

  void on_pedestrian_handoff(const Event& e) {
    auto& batch = pedestrians_[e.subject];
    if (batch.draw.direct_to_gateway) {
      handle_pedestrian_gateway(batch, result_.messages, e.timestamp);
      return;
    }
    const auto& br = buses_[batch.draw.bus_index];
    const auto& route = *routes_[br.route].route;
    auto stop = route.stops[batch.draw.stop_index];
    double t = boarding_time(*br.bus, stop, e.timestamp, route.circumference_km);
    if (t <= horizon_) push({t, 0, EventKind::kPedestrianBoard, e.subject, batch.draw.stop_index, 0});
  }

  void on_pedestrian_board(const Event& e) {
    auto& batch = pedestrians_[e.subject];
    auto& br = buses_[batch.draw.bus_index];
    handle_pedestrian_board(batch, br.buffer, result_.messages, batch.draw.bus_index, e.timestamp);
    const auto& route = *routes_[br.route].route;
    auto stop = route.stops[batch.draw.stop_index];
    if (std::find(route.gateway_positions.begin(), route.gateway_positions.end(), stop) !=
        route.gateway_positions.end()) {
      handle_bus_gateway_contact(br.buffer, result_.messages, e.timestamp);
    }
  }

  // Same lap arithmetic as BusAtPoint so a boarding at a gateway stop lands on
  // exactly the instant the bus is scheduled there.
  static double boarding_time(const BusState& bus, ArcPosition stop, double t_from, double c) {
    double d0 = arc_distance(bus.initial_position, stop, c);
    double laps = (bus.velocity_kmh * to_hours(t_from) - d0) / c;
    auto lap = static_cast<long long>(std::max(0.0, std::ceil(laps)));
    while (lap > 0 && crossing_time_on_lap(bus, stop, lap - 1, c) >= t_from) --lap;
    while (crossing_time_on_lap(bus, stop, lap, c) < t_from) ++lap;
    return crossing_time_on_lap(bus, stop, lap, c);
  }

  void finish() {
    ResidualCounts residual;
    for (const auto& buf : sensor_buffers_) residual.in_sensors += buf.size();
    for (const auto& p : pedestrians_) residual.in_pedestrians += p.messages.size();
    for (const auto& b : buses_) residual.in_buses += b.buffer.size();
    result_.residual = residual;
    result_.delivered = static_cast<std::uint64_t>(
        std::count_if(result_.messages.begin(), result_.messages.end(),
                      [](const Message& m) { return m.location == MessageLocation::kDelivered; }));
    check_result_invariants(result_);
  }

  const Scenario& scenario_;
  double horizon_;
  RunOptions options_;
  SimulationResult result_;

  std::vector<RouteRuntime> routes_;
  std::vector<BusRuntime> buses_;
  std::vector<const SensorSpec*> sensor_specs_;
  std::vector<std::vector<MessageId>> sensor_buffers_;
  std::vector<PedestrianBatch> pedestrians_;
  std::vector<RandomStream> pedestrian_rngs_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace

SimulationResult run(const Scenario& scenario, double horizon_s, const RunOptions& options) {
  if (!(horizon_s >= 0.0) || !std::isfinite(horizon_s)) {
    throw Error(ErrorCode::kInvalidTime, "horizon must be finite and >= 0");
  }
  validate_scenario(scenario);
  return Simulator(scenario, horizon_s, options).run();
}

void check_result_invariants(const SimulationResult& result) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvariant, what); };
  ResidualCounts counted;
  std::uint64_t delivered = 0;
  for (std::size_t i = 0; i < result.messages.size(); ++i) {
    const auto& m = result.messages[i];
    const std::string id = "message " + std::to_string(m.message_id);
    if (m.message_id != i) fail(id + " is out of order");
    if (m.t_generated < 0.0 || m.t_generated >= result.horizon_s) fail(id + " generated outside the run");
    double last = m.t_generated;
    for (const auto& stamp : {m.t_pedestrian_pickup, m.t_bus_board, m.t_delivered}) {
      if (!stamp) continue;
      if (*stamp < last || *stamp > result.horizon_s) fail(id + " has non-monotone timestamps");
      last = *stamp;
    }
    if (m.kind == SensorKind::kOnRoute && m.t_pedestrian_pickup) fail(id + " is on-route but met a pedestrian");
    switch (m.location) {
      case MessageLocation::kSensor: ++counted.in_sensors; break;
      case MessageLocation::kPedestrian: ++counted.in_pedestrians; break;
      case MessageLocation::kBus: ++counted.in_buses; break;
      case MessageLocation::kDelivered:
        ++delivered;
        if (!m.t_delivered || !m.delivery_path) fail(id + " delivered without a stamp");
        break;
    }
  }
  if (counted != result.residual || delivered != result.delivered) fail("buffer accounting mismatch");
  if (result.generated() != result.delivered + result.residual.total()) fail("message conservation violated");
}

}  // namespace dtnsim
