#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dtnsim/rng.hpp"
#include "dtnsim/scenario.hpp"

namespace dtnsim {

using MessageId = std::uint64_t;

enum class DeliveryPath {
  kSensorBusGateway,
  kSensorPedestrianBusGateway,
  kSensorPedestrianGateway,
};

const char* to_string(DeliveryPath path);

/// Where a message sits at the end of a run.
enum class MessageLocation { kSensor, kPedestrian, kBus, kDelivered };

struct Message {
  MessageId message_id = 0;
  std::uint32_t sensor_index = 0;  ///< into SimulationResult::sensors
  SensorKind kind = SensorKind::kOnRoute;
  double t_generated = 0.0;
  std::optional<double> t_pedestrian_pickup;
  std::optional<double> t_bus_board;
  std::optional<double> t_delivered;
  std::optional<DeliveryPath> delivery_path;
  std::optional<std::uint32_t> bus_index;  ///< carrier, once boarded
  MessageLocation location = MessageLocation::kSensor;

  bool operator==(const Message&) const = default;
};

enum class EventKind : std::uint8_t {
  kGenerate,
  kPedestrianArrival,
  kPedestrianHandoff,
  kPedestrianBoard,
  kBusAtPoint,
};

const char* to_string(EventKind kind);

/// Simultaneous events run in (timestamp, kind rank, sequence) order, where
/// the rank follows the enumerator order above: data generated at an instant
/// is available to any contact at that same instant.
struct Event {
  double timestamp = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::kGenerate;
  std::uint32_t subject = 0;  ///< sensor, pedestrian or bus index
  std::uint32_t point = 0;    ///< BusAtPoint: index in the bus's visiting order
  long long lap = 0;          ///< BusAtPoint / Generate: lap or period count

  bool runs_before(const Event& other) const;
};

struct TraceEntry {
  double timestamp = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::kGenerate;
  std::uint32_t subject = 0;
  std::uint32_t point = 0;

  bool operator==(const TraceEntry&) const = default;
};

struct SensorRecord {
  std::string sensor_id;
  SensorKind kind = SensorKind::kOnRoute;
  std::string route_id;

  bool operator==(const SensorRecord&) const = default;
};

struct BusRecord {
  std::string bus_id;
  std::string route_id;
  double circumference_km = 0.0;
  double velocity_kmh = 0.0;

  bool operator==(const BusRecord&) const = default;
};

struct ResidualCounts {
  std::uint64_t in_sensors = 0;
  std::uint64_t in_pedestrians = 0;
  std::uint64_t in_buses = 0;

  std::uint64_t total() const { return in_sensors + in_pedestrians + in_buses; }
  bool operator==(const ResidualCounts&) const = default;
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::string config_hash;
  double horizon_s = 0.0;
  ScenarioSummary summary;
  std::vector<SensorRecord> sensors;  ///< on-route first, then off-route
  std::vector<BusRecord> buses;
  std::vector<Message> messages;      ///< indexed by message_id
  std::uint64_t delivered = 0;
  ResidualCounts residual;
  std::vector<TraceEntry> trace;      ///< only when requested

  std::uint64_t generated() const { return messages.size(); }
  bool operator==(const SimulationResult&) const = default;
};

struct RunOptions {
  bool record_trace = false;
};

// ---------------------------------------------------------------------------
// Contact handlers. Each moves message ids between buffers and stamps the
// lifecycle; they are shared by the engine and usable on their own.

struct TransferRecord {
  double timestamp = 0.0;
  std::size_t count = 0;
};

/// The whole sensor buffer moves onto the bus in generation order.
TransferRecord handle_bus_sensor_contact(std::vector<MessageId>& sensor_buffer,
                                         std::vector<MessageId>& bus_buffer, std::vector<Message>& messages,
                                         std::uint32_t bus_index, double t);

struct DeliveryRecord {
  double timestamp = 0.0;
  std::vector<MessageId> delivered;
};

/// Everything the bus carries is delivered at `t`.
DeliveryRecord handle_bus_gateway_contact(std::vector<MessageId>& bus_buffer, std::vector<Message>& messages,
                                          double t);

/// Random choices made for one pedestrian visit, drawn in this order from the
/// sensor's pedestrian stream: T_PB, direct-to-gateway flag, bus, stop.
struct PedestrianDraw {
  double t_pb = 0.0;
  bool direct_to_gateway = false;
  std::uint32_t bus_index = 0;
  std::uint32_t stop_index = 0;  ///< into the chosen bus's route stop list
};

/// Gap until the next pedestrian reaches the sensor (truncated normal, > 0).
double draw_pedestrian_gap(RandomStream& rng, const SensorSpec& sensor);

PedestrianDraw draw_pedestrian(RandomStream& rng, const Scenario& scenario);

/// Stream feeding the pedestrian process of the i-th off-route sensor.
RandomStream pedestrian_stream(const Scenario& scenario, std::size_t offroute_index);

struct PedestrianBatch {
  std::vector<MessageId> messages;
  double t_pickup = 0.0;
  PedestrianDraw draw;
};

/// The pedestrian empties the sensor buffer at `t`.
PedestrianBatch handle_pedestrian_cycle(std::vector<MessageId>& sensor_buffer, std::vector<Message>& messages,
                                        const PedestrianDraw& draw, double t);

/// Direct branch: the batch reaches a gateway at `t`.
DeliveryRecord handle_pedestrian_gateway(PedestrianBatch& batch, std::vector<Message>& messages, double t);

/// Bus branch: the batch boards `bus_index` at `t`.
TransferRecord handle_pedestrian_board(PedestrianBatch& batch, std::vector<MessageId>& bus_buffer,
                                       std::vector<Message>& messages, std::uint32_t bus_index, double t);

// ---------------------------------------------------------------------------

/// Runs the scenario up to `horizon_s`. Generation events strictly before the
/// horizon create messages; contacts at or before it are executed.
SimulationResult run(const Scenario& scenario, double horizon_s, const RunOptions& options = {});

/// Throws kInvariant if conservation or per-message timestamp ordering fails.
void check_result_invariants(const SimulationResult& result);

}  // namespace dtnsim
