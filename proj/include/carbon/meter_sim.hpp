#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "carbon/model.hpp"
#include "carbon/time.hpp"

namespace carbon {

// Half-sine clear-sky generation curve for the whole plant.
struct SolarProfile {
  std::int64_t sunrise = 6 * 3600;   // seconds since midnight
  std::int64_t sunset = 20 * 3600;
  double peak_plant_power = 90'000.0;  // W
  double noise_stddev_fraction = 0.02;

  void validate(double plant_capacity_watts) const;
};

// At-least-once transport faults. Dropped deliveries are always retried.
struct FaultConfig {
  double duplicate_probability = 0.0;
  double drop_then_retry_probability = 0.0;
  int reorder_jitter_max = 0;  // seconds, at most kMaxReorderJitter
  std::uint64_t rng_seed = 0;

  void validate() const;
};

inline constexpr int kMaxReorderJitter = 30;

// Overrides one phase's active power for a whole minute; used to stage
// anomalies in otherwise clean simulated days.
struct InjectedSpike {
  int meter_id = 1;
  int phase = 1;
  int minute_of_day = 0;
  double active_power = 0.0;
};

struct FleetConfig {
  std::uint64_t seed = 1;
  SolarProfile profile;
  double plant_capacity_watts = 100'000.0;
  double accuracy_fraction = 0.01;  // fixed per-meter gain error band
  double nominal_voltage = 230.0;
  double voltage_stddev = 1.0;
  double nominal_frequency = 50.0;
  double frequency_stddev = 0.02;
  double nominal_power_factor = 0.99;
  double power_factor_stddev = 0.003;
  std::map<std::string, std::vector<int>> collectors = {{"A", {1, 2, 3, 4}}, {"B", {5, 6, 7, 8}}};
  std::vector<InjectedSpike> spikes;
  // Simulated span within the day, [begin_second, end_second).
  std::int64_t begin_second = 0;
  std::int64_t end_second = kSecondsPerDay;

  void validate() const;
};

struct TransportMessage {
  PhaseReading reading;
  int delivery_attempt = 1;
  Timestamp delivered_at;  // simulated clock at delivery
};

struct DeliveryStats {
  std::size_t generated = 0;   // distinct readings
  std::size_t delivered = 0;   // messages handed to the sink
  std::size_t duplicates = 0;  // extra copies beyond the first delivery
  std::size_t retries = 0;     // dropped first attempts that were redelivered
};

// Plant output in watts at `second_of_day`; zero outside (sunrise, sunset).
double clear_sky_power(double second_of_day, const SolarProfile& profile);

// Three phase readings for one meter at `t`. Deterministic in
// (fleet.seed, meter_id, t). Throws Error(kInvalidMeter) outside 1..8.
std::array<PhaseReading, 3> sample_meter(int meter_id, Timestamp t, const FleetConfig& fleet);

using MessageSink = std::function<void(const TransportMessage&)>;

// Streams one simulated day in delivery order. Each meter samples every 1 or
// 2 seconds (drawn per sample); every reading reaches the sink at least once.
DeliveryStats run_day(const FleetConfig& fleet, const Date& date, const FaultConfig& faults,
                      const MessageSink& sink);

// Convenience for tests over short spans.
std::vector<TransportMessage> collect_day(const FleetConfig& fleet, const Date& date, const FaultConfig& faults,
                                          DeliveryStats* stats = nullptr);

}  // namespace carbon
