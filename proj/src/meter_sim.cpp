#include "carbon/meter_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <tuple>

#include "carbon/errors.hpp"
#include "rng.hpp"

namespace carbon {
namespace {

using detail::mix_seed;
using detail::SplitMix64;

constexpr double kTruncateSigma = 3.0;
constexpr std::uint64_t kGainStream = 0x6761696eULL;
constexpr std::uint64_t kPeriodStream = 0x706572ULL;
constexpr std::uint64_t kGridStream = 0x67726964ULL;

double truncated_normal(SplitMix64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return std::clamp(n(rng), -kTruncateSigma, kTruncateSigma);
}

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

struct Pending {
  TransportMessage msg;

  auto order_key() const {
    return std::make_tuple(msg.delivered_at, msg.reading.ts, msg.reading.meter_id, msg.reading.phase,
                           msg.delivery_attempt);
  }
  // Min-heap on delivery order.
  bool operator<(const Pending& other) const { return order_key() > other.order_key(); }
};

}  // namespace

void SolarProfile::validate(double plant_capacity_watts) const {
  if (!(sunrise >= 0 && sunrise < sunset && sunset <= kSecondsPerDay)) {
    throw Error(Errc::kInvalidArgument, "solar profile requires 0 <= sunrise < sunset <= 86400");
  }
  if (!(peak_plant_power >= 0.0 && peak_plant_power <= plant_capacity_watts)) {
    throw Error(Errc::kInvalidArgument, "peak plant power must lie in [0, plant capacity]");
  }
  if (!(noise_stddev_fraction >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "noise fraction must be non-negative");
  }
}

void FaultConfig::validate() const {
  if (!in_unit_interval(duplicate_probability) || !in_unit_interval(drop_then_retry_probability)) {
    throw Error(Errc::kInvalidArgument, "fault probabilities must lie in [0, 1]");
  }
  if (reorder_jitter_max < 0 || reorder_jitter_max > kMaxReorderJitter) {
    throw Error(Errc::kInvalidArgument, "reorder jitter must lie in [0, 30] seconds");
  }
}

void FleetConfig::validate() const {
  profile.validate(plant_capacity_watts);
  if (!(accuracy_fraction >= 0.0 && accuracy_fraction < 0.5)) {
    throw Error(Errc::kInvalidArgument, "accuracy fraction must lie in [0, 0.5)");
  }
  if (begin_second < 0 || begin_second > end_second || end_second > kSecondsPerDay) {
    throw Error(Errc::kInvalidArgument, "simulated span must lie within the day");
  }
  std::set<int> seen;
  for (const auto& [id, meters] : collectors) {
    if (id.empty()) throw Error(Errc::kInvalidArgument, "collector id must not be empty");
    for (int m : meters) {
      if (m < 1 || m > kMeterCount) throw Error(Errc::kInvalidMeter, "meter " + std::to_string(m) + " outside 1..8");
      if (!seen.insert(m).second) {
        throw Error(Errc::kInvalidArgument, "meter " + std::to_string(m) + " assigned to two collectors");
      }
    }
  }
  for (const auto& s : spikes) {
    if (s.meter_id < 1 || s.meter_id > kMeterCount || s.phase < 1 || s.phase > kPhasesPerMeter ||
        s.minute_of_day < 0 || s.minute_of_day >= kMinutesPerDay) {
      throw Error(Errc::kInvalidArgument, "injected spike out of range");
    }
  }
}

double clear_sky_power(double second_of_day, const SolarProfile& profile) {
  const auto rise = static_cast<double>(profile.sunrise);
  const auto set = static_cast<double>(profile.sunset);
  if (second_of_day <= rise || second_of_day >= set) return 0.0;
  const double p = profile.peak_plant_power * std::sin(std::numbers::pi * (second_of_day - rise) / (set - rise));
  return std::max(0.0, p);
}

std::array<PhaseReading, 3> sample_meter(int meter_id, Timestamp t, const FleetConfig& fleet) {
  if (meter_id < 1 || meter_id > kMeterCount) {
    throw Error(Errc::kInvalidMeter, "meter " + std::to_string(meter_id) + " outside 1..8");
  }
  const auto seed = fleet.seed;
  const auto meter = static_cast<std::uint64_t>(meter_id);
  const auto when = static_cast<std::uint64_t>(t.seconds);

  SplitMix64 gain_rng(mix_seed({seed, meter, kGainStream}));
  const double gain = 1.0 + fleet.accuracy_fraction * (2.0 * gain_rng.uniform() - 1.0);

  // Grid frequency is shared by every meter at a given instant.
  SplitMix64 grid_rng(mix_seed({seed, kGridStream, when}));
  const double frequency = fleet.nominal_frequency + fleet.frequency_stddev * truncated_normal(grid_rng);

  SplitMix64 rng(mix_seed({seed, meter, when}));
  const double nominal = clear_sky_power(static_cast<double>(t.second_of_day()), fleet.profile) / kPlantPhases;
  const int minute_of_day = static_cast<int>(t.second_of_day() / kSecondsPerMinute);

  std::array<PhaseReading, 3> out;
  for (int phase = 1; phase <= kPhasesPerMeter; ++phase) {
    const double z_power = truncated_normal(rng);
    const double z_voltage = truncated_normal(rng);
    const double z_pf = truncated_normal(rng);

    double active = std::max(0.0, nominal * gain * (1.0 + fleet.profile.noise_stddev_fraction * z_power));
    for (const auto& spike : fleet.spikes) {
      if (spike.meter_id == meter_id && spike.phase == phase && spike.minute_of_day == minute_of_day) {
        active = spike.active_power;
      }
    }
    const double voltage = fleet.nominal_voltage + fleet.voltage_stddev * z_voltage;
    const double pf = std::clamp(fleet.nominal_power_factor + fleet.power_factor_stddev * z_pf, 0.05, 1.0);
    const double apparent = std::abs(active) / pf;

    PhaseReading& r = out[phase - 1];
    r.meter_id = meter_id;
    r.phase = phase;
    r.ts = t;
    r.active_power = active;
    r.voltage = voltage;
    r.current = voltage > 0.0 ? apparent / voltage : 0.0;
    r.power_factor = pf;
    r.frequency = frequency;
    r.apparent_power = apparent;
  }
  return out;
}

DeliveryStats run_day(const FleetConfig& fleet, const Date& date, const FaultConfig& faults,
                      const MessageSink& sink) {
  fleet.validate();
  faults.validate();

  DeliveryStats stats;
  std::priority_queue<Pending> in_flight;
  const Timestamp midnight = date.midnight();

  std::array<std::int64_t, kMeterCount> next_sample{};
  std::vector<SplitMix64> period_rngs;
  for (int m = 1; m <= kMeterCount; ++m) {
    next_sample[m - 1] = fleet.begin_second;
    period_rngs.emplace_back(mix_seed({fleet.seed, static_cast<std::uint64_t>(m), kPeriodStream}));
  }

  auto release_before = [&](Timestamp horizon) {
    while (!in_flight.empty() && in_flight.top().msg.delivered_at < horizon) {
      sink(in_flight.top().msg);
      ++stats.delivered;
      in_flight.pop();
    }
  };

  const auto jitter_span = static_cast<std::uint64_t>(faults.reorder_jitter_max) + 1;
  for (std::int64_t second = fleet.begin_second; second < fleet.end_second; ++second) {
    const Timestamp now = midnight + second;
    // Anything generated from here on is delivered at or after `now`.
    release_before(now);
    for (int m = 1; m <= kMeterCount; ++m) {
      if (next_sample[m - 1] != second) continue;
      next_sample[m - 1] += 1 + static_cast<std::int64_t>(period_rngs[m - 1]() & 1U);

      for (const PhaseReading& reading : sample_meter(m, now, fleet)) {
        ++stats.generated;
        SplitMix64 fault_rng(mix_seed({faults.rng_seed, static_cast<std::uint64_t>(m),
                                       static_cast<std::uint64_t>(reading.phase),
                                       static_cast<std::uint64_t>(now.seconds)}));
        int attempt = 1;
        if (fault_rng.uniform() < faults.drop_then_retry_probability) {
          ++stats.retries;
          attempt = 2;
        }
        const bool duplicate = fault_rng.uniform() < faults.duplicate_probability;
        const int copies = duplicate ? 2 : 1;
        if (duplicate) ++stats.duplicates;
        for (int c = 0; c < copies; ++c) {
          TransportMessage msg;
          msg.reading = reading;
          msg.delivery_attempt = attempt + c;
          msg.delivered_at = now + static_cast<std::int64_t>(fault_rng() % jitter_span);
          in_flight.push(Pending{msg});
        }
      }
    }
  }
  release_before(Timestamp{std::numeric_limits<std::int64_t>::max()});
  return stats;
}

std::vector<TransportMessage> collect_day(const FleetConfig& fleet, const Date& date, const FaultConfig& faults,
                                          DeliveryStats* stats) {
  std::vector<TransportMessage> out;
  const DeliveryStats s = run_day(fleet, date, faults, [&](const TransportMessage& m) { out.push_back(m); });
  if (stats) *stats = s;
  return out;
}

}  // namespace carbon
