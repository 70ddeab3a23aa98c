#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "wapsel/domain.hpp"
#include "wapsel/measurement.hpp"
#include "wapsel/reward.hpp"

namespace wapsel {

// Time-conditional categorical distribution over apps.
struct AppUsageProfile {
  std::array<std::array<double, kNumApps>, kNumTimes> probability{};

  static AppUsageProfile in_distribution();
  static AppUsageProfile out_of_distribution();
  void validate() const;
};

struct BatteryRange {
  double lo = 0.0;
  double hi = 100.0;
};

struct DatasetConfig {
  std::size_t logs_per_session = 2000;
  double sample_interval_s = 5.0;
  std::size_t window = kDefaultWindow;
  double split_fraction = 0.8;
  std::uint64_t seed = 42;
  // Indexed by BatteryClass; sampled as uniform [lo, hi).
  std::array<BatteryRange, kNumBatteryClasses> battery_ranges{
      BatteryRange{70.0, 100.0}, BatteryRange{30.0, 70.0}, BatteryRange{5.0, 30.0}};

  void validate() const;
};

// Batteries never drain below this level.
inline constexpr double kBatteryFloorPct = 5.0;

struct Sample {
  Context context;
  MeasurementVector measurements;
  RewardVector rewards;
  Scenario scenario;
};

using Dataset = std::vector<Sample>;

// Battery classes of (publisher, subscriber) for a scenario.
std::pair<BatteryClass, BatteryClass> battery_classes(BatteryConfig config);

AppType sample_app(const AppUsageProfile& profile, TimeOfDay time, std::mt19937_64& rng);

// One session of cfg.logs_per_session consecutive samples.
std::vector<Sample> generate_session(const Scenario& scenario, const AppUsageProfile& profile,
                                     const LinkModelConfig& link, const DatasetConfig& cfg,
                                     const RewardConfig& reward_cfg, const ToleranceTable& tol,
                                     std::mt19937_64& rng);

// Seeds the stream for one session from (seed, stream, scenario).
std::mt19937_64 session_rng(std::uint64_t seed, std::uint64_t stream, std::size_t scenario);

// Stream tags keep in-distribution, OOD and split randomness independent.
enum class Stream : std::uint64_t { inDistribution = 1, outOfDistribution = 2, split = 3 };

// All 16 scenarios, one session each, scenario-major. Sessions run concurrently.
Dataset generate_dataset(const AppUsageProfile& profile, const LinkModelConfig& link,
                         const DatasetConfig& cfg, const RewardConfig& reward_cfg,
                         const ToleranceTable& tol, Stream stream);

// Stratified by scenario: each scenario keeps floor(fraction * n) samples in
// train. Both halves preserve input order.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction, std::mt19937_64& rng);

// Hides the subscriber battery; measurements and rewards are untouched.
Dataset mask_peer(Dataset dataset);

// Recomputes every RewardVector from the stored measurements.
Dataset relabel(Dataset dataset, const RewardConfig& cfg, const ToleranceTable& tol);

// Largest |stored - recomputed| objective difference across the dataset.
double annotation_error(const Dataset& dataset, const RewardConfig& cfg, const ToleranceTable& tol);

// Line-delimited dataset records: the log record plus rewards[8] and
// scenario{time, battery_config}.
std::string serialize_dataset(std::span<const Sample> dataset);
void save_dataset(const std::filesystem::path& path, std::span<const Sample> dataset);

// The stored rewards become the objective; sub-scores are recomputed with cfg.
Dataset load_dataset(const std::filesystem::path& path, std::size_t window,
                     const RewardConfig& cfg, const ToleranceTable& tol);

}  // namespace wapsel
