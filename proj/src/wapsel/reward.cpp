#include "wapsel/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wapsel/errors.hpp"

namespace wapsel {

ToleranceTable ToleranceTable::defaults() {
  // textMessage, voiceChat, videoCall, sensorSync, photoTransfer, videoUpload, firmwareUpdate, mapSync
  return ToleranceTable{{200.0, 50.0, 100.0, 1000.0, 2000.0, 5000.0, 10000.0, 500.0}};
}

void ToleranceTable::validate() const {
  for (double t : tolerance_ms) {
    if (!(t > 0.0)) throw ValidationError("latency tolerances must be > 0");
  }
}

std::string_view name(RewardMode m) { return m == RewardMode::naive ? "naive" : "contextAware"; }

template <>
RewardMode parse_enum<RewardMode>(std::string_view text) {
  if (text == "contextAware" || text == "context") return RewardMode::contextAware;
  if (text == "naive") return RewardMode::naive;
  throw ParseError("unknown reward mode '" + std::string(text) + "'");
}

void RewardConfig::validate() const {
  if (!(w_latency >= 0.0) || !(w_power >= 0.0) || !(w_latency + w_power > 0.0)) {
    throw ValidationError("reward weights must be non-negative with a positive sum");
  }
  if (!(soft_label_temperature > 0.0)) throw ValidationError("soft label temperature must be > 0");
}

double latency_score(AppType app, double latency_ms, const ToleranceTable& tol) {
  return std::max(100.0 - 100.0 * latency_ms / tol[app], 0.0);
}

double energy_score(double battery_pct, double energy_pct_per_hour) {
  if (!(energy_pct_per_hour > 0.0)) throw std::domain_error("energy usage must be > 0");
  if (!(battery_pct > 0.0)) throw std::domain_error("battery level must be > 0");
  return battery_pct / energy_pct_per_hour;
}

RewardVector compute_rewards(const Context& context, const MeasurementVector& mv,
                             const RewardConfig& cfg, const ToleranceTable& tol) {
  if (context.app_history.empty()) throw std::invalid_argument("empty app history");
  double batteries[2] = {context.publisher_battery, context.subscriber_battery.value_or(0.0)};
  const std::size_t devices = context.subscriber_battery ? 2 : 1;
  const double apps = static_cast<double>(context.app_history.size());
  const bool naive = cfg.mode == RewardMode::naive;

  RewardVector rv;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    const double latency = mv.latency_ms[a];
    const double energy = mv.energy_pct_per_hour[a];

    double lat_sum = 0.0;
    for (AppType app : context.app_history) {
      lat_sum += naive ? std::max(100.0 - 100.0 * latency / kNaiveLatencyRefMs, 0.0)
                       : latency_score(app, latency, tol);
    }
    double eng_sum = 0.0;
    double inv_sum = 0.0;
    for (std::size_t d = 0; d < devices; ++d) {
      const double b = naive ? kNaiveBatteryRef : batteries[d];
      eng_sum += energy_score(b, energy);
      inv_sum += energy / b;
    }
    rv.latency_score[a] = lat_sum / apps;
    rv.energy_score[a] = eng_sum / static_cast<double>(devices);
    rv.objective[a] =
        cfg.w_latency * rv.latency_score[a] - cfg.w_power * inv_sum / static_cast<double>(devices);
  }
  return rv;
}

PerAction soft_labels(const PerAction& objective, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  const double top = *std::max_element(objective.begin(), objective.end());
  PerAction p{};
  double z = 0.0;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    p[i] = std::exp((objective[i] - top) / temperature);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace wapsel
