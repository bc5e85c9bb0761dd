#include "dtnsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dtnsim/error.hpp"
#include "dtnsim/units.hpp"
#include "json.hpp"

namespace dtnsim::metrics {

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kSensorToBus: return "sensor_to_bus";
    case Stage::kBusToGateway: return "bus_to_gateway";
    case Stage::kSensorToPedestrian: return "sensor_to_pedestrian";
    case Stage::kPedestrianToBus: return "pedestrian_to_bus";
    case Stage::kTotal: return "total";
  }
  return "unknown";
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kStatistics, "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= sorted.size()) return sorted.back();
  return sorted[k] + (h - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

std::optional<Quantiles> summarize(std::vector<double> samples) {
  if (samples.empty()) return std::nullopt;
  std::sort(samples.begin(), samples.end());
  Quantiles q;
  q.n = samples.size();
  q.min = samples.front();
  q.max = samples.back();
  q.q1 = quantile_sorted(samples, 0.25);
  q.median = quantile_sorted(samples, 0.5);
  q.q3 = quantile_sorted(samples, 0.75);
  // Interpolation can overshoot by an ulp when neighbours are equal.
  q.q1 = std::clamp(q.q1, q.min, q.max);
  q.median = std::clamp(q.median, q.q1, q.max);
  q.q3 = std::clamp(q.q3, q.median, q.max);
  q.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  return q;
}

namespace {

std::optional<double> stage_delay(const Message& m, Stage stage) {
  switch (stage) {
    case Stage::kSensorToBus:
      if (m.kind == SensorKind::kOnRoute && m.t_bus_board) return *m.t_bus_board - m.t_generated;
      return std::nullopt;
    case Stage::kBusToGateway:
      if (m.t_bus_board && m.t_delivered) return *m.t_delivered - *m.t_bus_board;
      return std::nullopt;
    case Stage::kSensorToPedestrian:
      if (m.t_pedestrian_pickup) return *m.t_pedestrian_pickup - m.t_generated;
      return std::nullopt;
    case Stage::kPedestrianToBus:
      if (m.t_pedestrian_pickup && m.t_bus_board) return *m.t_bus_board - *m.t_pedestrian_pickup;
      return std::nullopt;
    case Stage::kTotal:
      if (m.t_delivered) return *m.t_delivered - m.t_generated;
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> ratio(std::uint64_t delivered, std::uint64_t generated) {
  if (generated == 0) return std::nullopt;
  return static_cast<double>(delivered) / static_cast<double>(generated);
}

struct SeriesSpec {
  const char* name;
  Stage stage;
  SensorKind kind;
};

constexpr SeriesSpec kSeries[] = {
    {"onroute.sensor_to_bus", Stage::kSensorToBus, SensorKind::kOnRoute},
    {"onroute.bus_to_gateway", Stage::kBusToGateway, SensorKind::kOnRoute},
    {"onroute.total", Stage::kTotal, SensorKind::kOnRoute},
    {"offroute.sensor_to_pedestrian", Stage::kSensorToPedestrian, SensorKind::kOffRoute},
    {"offroute.pedestrian_to_bus", Stage::kPedestrianToBus, SensorKind::kOffRoute},
    {"offroute.bus_to_gateway", Stage::kBusToGateway, SensorKind::kOffRoute},
    {"offroute.total", Stage::kTotal, SensorKind::kOffRoute},
};

std::string fmt_opt(const std::optional<double>& v, int digits = 6) {
  return v ? format_fixed(*v, digits) : std::string();
}

std::string fmt_rate(const std::optional<double>& v) { return v ? format_fixed(*v, 6) : std::string("NA"); }

}  // namespace

StageSamples stage_delays(const SimulationResult& result, Stage stage, std::optional<SensorKind> kind) {
  StageSamples out;
  for (const auto& m : result.messages) {
    if (m.location != MessageLocation::kDelivered) continue;
    if (kind && m.kind != *kind) continue;
    if (auto d = stage_delay(m, stage)) out.values.push_back(*d);
  }
  out.quantiles = summarize(out.values);
  return out;
}

std::optional<double> delivery_rate(std::string_view sensor_id, const SimulationResult& result) {
  auto it = std::find_if(result.sensors.begin(), result.sensors.end(),
                         [&](const SensorRecord& s) { return s.sensor_id == sensor_id; });
  if (it == result.sensors.end()) {
    throw Error(ErrorCode::kLookup, "unknown sensor '" + std::string(sensor_id) + "'");
  }
  const auto index = static_cast<std::uint32_t>(it - result.sensors.begin());
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  for (const auto& m : result.messages) {
    if (m.sensor_index != index) continue;
    ++generated;
    if (m.location == MessageLocation::kDelivered) ++delivered;
  }
  return ratio(delivered, generated);
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram histogram(SensorKind kind, std::span<const double> rates, int bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidParameter, "histogram needs at least one bin");
  Histogram h{kind, std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0)};
  for (double r : rates) {
    auto b = static_cast<long long>(std::floor(r * bins));
    b = std::clamp<long long>(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

const StageSeries& MetricsReport::series(std::string_view name) const {
  for (const auto& s : stages) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::kLookup, "unknown stage series '" + std::string(name) + "'");
}

const SensorRate& MetricsReport::sensor(std::string_view sensor_id) const {
  for (const auto& s : sensors) {
    if (s.sensor_id == sensor_id) return s;
  }
  throw Error(ErrorCode::kLookup, "unknown sensor '" + std::string(sensor_id) + "'");
}

std::vector<double> MetricsReport::seed_rates(SensorKind kind) const {
  std::vector<double> out;
  for (const auto& s : sensors) {
    if (s.kind != kind) continue;
    for (const auto& p : s.per_seed) {
      if (p.rate) out.push_back(*p.rate);
    }
  }
  return out;
}

MetricsReport build_report(const SimulationResult& result, int histogram_bins) {
  MetricsReport report;
  report.metadata = {{result.seed}, result.horizon_s, result.config_hash};

  std::vector<std::uint64_t> generated(result.sensors.size(), 0);
  std::vector<std::uint64_t> delivered(result.sensors.size(), 0);
  for (const auto& m : result.messages) {
    ++generated[m.sensor_index];
    if (m.location == MessageLocation::kDelivered) ++delivered[m.sensor_index];
  }
  for (std::size_t i = 0; i < result.sensors.size(); ++i) {
    SensorRate s;
    s.sensor_id = result.sensors[i].sensor_id;
    s.kind = result.sensors[i].kind;
    s.generated = generated[i];
    s.delivered = delivered[i];
    s.rate = ratio(s.delivered, s.generated);
    s.per_seed.push_back({result.seed, s.generated, s.delivered, s.rate});
    report.sensors.push_back(std::move(s));
  }

  for (const auto& spec : kSeries) {
    auto samples = stage_delays(result, spec.stage, spec.kind);
    report.stages.push_back({spec.name, spec.stage, spec.kind, std::move(samples.values), samples.quantiles});
  }

  for (auto kind : {SensorKind::kOnRoute, SensorKind::kOffRoute}) {
    auto rates = report.seed_rates(kind);
    report.histograms.push_back(histogram(kind, rates, histogram_bins));
  }
  return report;
}

MetricsReport aggregate_runs(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kAggregation, "nothing to aggregate");
  const auto& first = reports.front();
  MetricsReport out;
  out.metadata.config_hash = first.metadata.config_hash;
  out.metadata.horizon_s = first.metadata.horizon_s;

  std::map<std::string, std::size_t, std::less<>> sensor_slot;
  for (const auto& r : reports) {
    if (r.metadata.config_hash != first.metadata.config_hash) {
      throw Error(ErrorCode::kAggregation, "cannot pool runs with config hashes " + first.metadata.config_hash +
                                               " and " + r.metadata.config_hash);
    }
    if (r.histograms.size() != first.histograms.size()) {
      throw Error(ErrorCode::kAggregation, "histogram layouts differ");
    }
    out.metadata.seeds.insert(out.metadata.seeds.end(), r.metadata.seeds.begin(), r.metadata.seeds.end());

    for (const auto& s : r.sensors) {
      auto [it, fresh] = sensor_slot.try_emplace(s.sensor_id, out.sensors.size());
      if (fresh) {
        SensorRate blank;
        blank.sensor_id = s.sensor_id;
        blank.kind = s.kind;
        out.sensors.push_back(std::move(blank));
      }
      auto& dst = out.sensors[it->second];
      dst.generated += s.generated;
      dst.delivered += s.delivered;
      dst.per_seed.insert(dst.per_seed.end(), s.per_seed.begin(), s.per_seed.end());
    }
  }

  for (auto& s : out.sensors) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : s.per_seed) {
      if (!p.rate) continue;
      sum += *p.rate;
      ++n;
    }
    if (n > 0) s.rate = sum / static_cast<double>(n);
  }

  for (std::size_t i = 0; i < first.stages.size(); ++i) {
    StageSeries series{first.stages[i].name, first.stages[i].stage, first.stages[i].kind, {}, std::nullopt};
    for (const auto& r : reports) {
      if (i >= r.stages.size() || r.stages[i].name != series.name) {
        throw Error(ErrorCode::kAggregation, "stage layouts differ");
      }
      series.samples.insert(series.samples.end(), r.stages[i].samples.begin(), r.stages[i].samples.end());
    }
    series.quantiles = summarize(series.samples);
    out.stages.push_back(std::move(series));
  }

  for (std::size_t i = 0; i < first.histograms.size(); ++i) {
    Histogram h = first.histograms[i];
    std::fill(h.counts.begin(), h.counts.end(), 0);
    for (const auto& r : reports) {
      const auto& src = r.histograms[i];
      if (src.kind != h.kind || src.counts.size() != h.counts.size()) {
        throw Error(ErrorCode::kAggregation, "histogram layouts differ");
      }
      for (std::size_t b = 0; b < h.counts.size(); ++b) h.counts[b] += src.counts[b];
    }
    out.histograms.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exports

void write_messages_csv(std::ostream& out, const SimulationResult& result) {
  out << kMessagesHeader << '\n';
  for (const auto& m : result.messages) {
    out << m.message_id << ',' << result.sensors[m.sensor_index].sensor_id << ',' << to_string(m.kind) << ','
        << format_fixed(m.t_generated, 6) << ',' << fmt_opt(m.t_pedestrian_pickup) << ',' << fmt_opt(m.t_bus_board)
        << ',' << fmt_opt(m.t_delivered) << ',' << (m.delivery_path ? to_string(*m.delivery_path) : "") << '\n';
  }
}

void write_sensor_rates_csv(std::ostream& out, const MetricsReport& report) {
  out << kSensorRatesHeader << '\n';
  for (const auto& s : report.sensors) {
    out << s.sensor_id << ',' << to_string(s.kind) << ',' << s.generated << ',' << s.delivered << ','
        << fmt_rate(s.rate) << '\n';
  }
}

void write_sensor_rates_by_seed_csv(std::ostream& out, const MetricsReport& report) {
  out << kSensorRatesBySeedHeader << '\n';
  for (const auto& s : report.sensors) {
    for (const auto& p : s.per_seed) {
      out << p.seed << ',' << s.sensor_id << ',' << to_string(s.kind) << ',' << p.generated << ','
          << p.delivered << ',' << fmt_rate(p.rate) << '\n';
    }
  }
}

void write_stage_quantiles_csv(std::ostream& out, const MetricsReport& report) {
  out << kStageQuantilesHeader << '\n';
  for (const auto& s : report.stages) {
    out << s.name;
    if (s.quantiles) {
      const auto& q = *s.quantiles;
      for (double v : {q.min, q.q1, q.median, q.q3, q.max, q.mean}) out << ',' << format_fixed(v, 6);
      out << ',' << q.n << '\n';
    } else {
      out << ",,,,,,,0\n";
    }
  }
}

void write_histogram_csv(std::ostream& out, const MetricsReport& report) {
  out << kHistogramHeader << '\n';
  for (const auto& h : report.histograms) {
    const auto bins = static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << to_string(h.kind) << ',' << format_fixed(static_cast<double>(b) / bins, 4) << ','
          << format_fixed(static_cast<double>(b + 1) / bins, 4) << ',' << h.counts[b] << '\n';
    }
  }
}

std::string summary_json(const MetricsReport& report, std::string_view tool_version) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = report.metadata.config_hash;
  j["horizon_s"] = report.metadata.horizon_s;
  j["seeds"] = report.metadata.seeds;
  for (auto kind : {SensorKind::kOnRoute, SensorKind::kOffRoute}) {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::size_t sensors = 0;
    for (const auto& s : report.sensors) {
      if (s.kind != kind) continue;
      ++sensors;
      generated += s.generated;
      delivered += s.delivered;
    }
    j["counts"][to_string(kind)] = {{"sensors", sensors}, {"generated", generated}, {"delivered", delivered}};
  }
  ordered_json stages = ordered_json::object();
  for (const auto& s : report.stages) {
    if (!s.quantiles) {
      stages[s.name] = nullptr;
      continue;
    }
    const auto& q = *s.quantiles;
    stages[s.name] = {{"n", q.n},          {"min_s", q.min},   {"q1_s", q.q1}, {"median_s", q.median},
                      {"q3_s", q.q3},      {"max_s", q.max},   {"mean_s", q.mean}};
  }
  j["stages"] = stages;
  return j.dump(2) + "\n";
}

}  // namespace dtnsim::metrics
