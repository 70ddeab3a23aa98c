#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "wapsel/domain.hpp"

namespace wapsel {

// Per-action link measurements for one context: one entry per canonical action index.
struct MeasurementVector {
  PerAction latency_ms{};
  PerAction energy_pct_per_hour{};

  // Latencies >= 0, energies > 0 (energy is a divisor in the energy score).
  void validate() const;
  friend bool operator==(const MeasurementVector&, const MeasurementVector&) = default;
};

struct LinkModelConfig {
  PerAction base_latency_ms{};
  PerAction base_energy_pct_per_hour{};
  std::array<double, kNumTimes> time_latency_multiplier{};
  double latency_noise_sigma = 0.0;
  double energy_noise_sigma = 0.0;

  static LinkModelConfig defaults();
  LinkModelConfig noiseless() const;

  // Checks positivity and the latency/energy ordering constraints.
  void validate() const;
};

// Energy multiplier floor for the truncated Gaussian noise.
inline constexpr double kEnergyNoiseFloor = 0.1;

// latency[a] = base * time_multiplier * exp(sigma_lat * z)
// energy[a]  = base * max(0.1, 1 + sigma_eng * z')
// Draws exactly 16 standard normals from rng regardless of sigma.
MeasurementVector measure(const LinkModelConfig& config, const Context& context,
                          std::mt19937_64& rng);

struct LogRecord {
  Context context;
  MeasurementVector measurements;
};

// Line-delimited measurement log. Unknown fields are dropped. When a record
// has no "history" array the window is rebuilt from consecutive records of the
// same session (a record with step 0 starts a new session), padding by the
// session's first app.
std::vector<LogRecord> ingest_log(const std::filesystem::path& path,
                                  std::size_t window = kDefaultWindow);
void export_log(const std::filesystem::path& path, std::span<const LogRecord> records);

}  // namespace wapsel
