#include "oracles.hpp"

#include <cmath>

#include "wapsel/reward.hpp"

namespace oracle {

std::array<double, 8> objective(const wapsel::Context& ctx, const wapsel::MeasurementVector& mv,
                                double w_l, double w_p, bool naive) {
  std::vector<double> batteries{ctx.publisher_battery};
  if (ctx.subscriber_battery) batteries.push_back(*ctx.subscriber_battery);
  std::array<double, 8> out{};
  for (int p = 0; p < 8; ++p) {
    double lat = 0.0;
    for (auto app : ctx.app_history) {
      const double tol = naive ? 1000.0 : kToleranceMs[static_cast<int>(app)];
      double s = 100.0 - 100.0 * mv.latency_ms[p] / tol;
      if (s < 0.0) s = 0.0;
      lat += s;
    }
    lat /= static_cast<double>(ctx.app_history.size());
    double eng = 0.0;
    for (double b : batteries) eng += mv.energy_pct_per_hour[p] / (naive ? 100.0 : b);
    eng /= static_cast<double>(batteries.size());
    out[p] = w_l * lat - w_p * eng;
  }
  return out;
}

std::size_t first_max(const std::array<double, 8>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::size_t first_min(const std::array<double, 8>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

double softmax_nll(const std::array<double, 8>& logits, std::size_t y) {
  long double sum = 0.0L;
  for (double z : logits) sum += std::exp(static_cast<long double>(z));
  return static_cast<double>(std::log(sum) - static_cast<long double>(logits[y]));
}

std::size_t rule_action(const std::vector<wapsel::AppType>& history) {
  static constexpr int kPreferred[8] = {0, 3, 2, 5, 4, 4, 5, 0};
  std::array<int, 8> votes{};
  for (auto app : history) ++votes[kPreferred[static_cast<int>(app)]];
  std::size_t best = 0;
  for (std::size_t i = 1; i < 8; ++i) {
    if (votes[i] > votes[best]) best = i;
  }
  return best;
}

wapsel::Context random_context(std::mt19937_64& rng, std::size_t window, bool with_peer) {
  std::uniform_int_distribution<int> app(0, 7), time(0, 3);
  std::uniform_real_distribution<double> battery(5.0, 100.0);
  wapsel::Context ctx;
  ctx.time = static_cast<wapsel::TimeOfDay>(time(rng));
  ctx.publisher_battery = battery(rng);
  if (with_peer) ctx.subscriber_battery = battery(rng);
  for (std::size_t i = 0; i < window; ++i) ctx.app_history.push_back(static_cast<wapsel::AppType>(app(rng)));
  return ctx;
}

wapsel::MeasurementVector random_measurements(std::mt19937_64& rng) {
  // Log-uniform latency so that both the linear part and the clamp get exercised.
  std::uniform_real_distribution<double> log_lat(-1.0, std::log(20000.0));
  std::uniform_real_distribution<double> energy(0.1, 10.0);
  wapsel::MeasurementVector mv;
  for (int p = 0; p < 8; ++p) {
    mv.latency_ms[p] = std::exp(log_lat(rng));
    mv.energy_pct_per_hour[p] = energy(rng);
  }
  return mv;
}

wapsel::DatasetConfig small_dataset_config(std::size_t logs_per_session, std::uint64_t seed) {
  wapsel::DatasetConfig cfg;
  cfg.logs_per_session = logs_per_session;
  cfg.seed = seed;
  return cfg;
}

wapsel::Dataset small_dataset(std::size_t logs_per_session, std::uint64_t seed, wapsel::Stream stream) {
  const auto profile = stream == wapsel::Stream::outOfDistribution ? wapsel::AppUsageProfile::out_of_distribution()
                                                                   : wapsel::AppUsageProfile::in_distribution();
  return wapsel::generate_dataset(profile, wapsel::LinkModelConfig::defaults(),
                                  small_dataset_config(logs_per_session, seed), wapsel::RewardConfig{},
                                  wapsel::ToleranceTable::defaults(), stream);
}

wapsel::HeadModel random_model(std::size_t layers, std::size_t hidden, std::mt19937_64& rng, double scale) {
  auto model = wapsel::HeadModel::zeros(layers, hidden);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& p : model.parameters()) p = u(rng);
  return model;
}

std::vector<double> random_features(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(wapsel::kFeatureDim);
  for (double& v : x) v = u(rng);
  return x;
}

}  // namespace oracle
