#pragma once

#include "wapsel/domain.hpp"
#include "wapsel/measurement.hpp"

namespace wapsel {

// Per-application latency tolerance L_a in milliseconds.
struct ToleranceTable {
  std::array<double, kNumApps> tolerance_ms{};

  static ToleranceTable defaults();
  double operator[](AppType app) const { return tolerance_ms[code(app)]; }
  void validate() const;
};

enum class RewardMode : std::uint8_t { contextAware = 0, naive = 1 };

std::string_view name(RewardMode m);
template <>
RewardMode parse_enum<RewardMode>(std::string_view text);

struct RewardConfig {
  double w_latency = 0.1;
  double w_power = 1.0;
  RewardMode mode = RewardMode::contextAware;
  double soft_label_temperature = 1.0;

  void validate() const;
};

// Context-independent normalizers used by the naive ablation reward.
inline constexpr double kNaiveLatencyRefMs = 1000.0;
inline constexpr double kNaiveBatteryRef = 100.0;

struct RewardVector {
  PerAction objective{};
  PerAction latency_score{};  // mean over the app window, in [0,100]
  PerAction energy_score{};   // mean over visible devices of b_d / E(p)
};

// max(100 - 100 * latency / L_a, 0)
double latency_score(AppType app, double latency_ms, const ToleranceTable& tol);

// b_d / E(p). Throws std::domain_error for energy <= 0 or battery <= 0.
double energy_score(double battery_pct, double energy_pct_per_hour);

// Objective, latency and energy sub-scores for every action. The app set is
// the history window (repeats weight the mean); the device set is the
// publisher plus the subscriber when its battery is visible.
RewardVector compute_rewards(const Context& context, const MeasurementVector& mv,
                             const RewardConfig& cfg, const ToleranceTable& tol);

// Max-shifted temperature softmax over the objectives.
PerAction soft_labels(const PerAction& objective, double temperature);

}  // namespace wapsel
