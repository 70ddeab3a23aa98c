#include "wapsel/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>

#include "wapsel/errors.hpp"
#include "wapsel/io.hpp"
#include "wapsel/records.hpp"

namespace wapsel {
namespace {

using P = std::array<double, kNumApps>;

// Column order: textMessage, voiceChat, videoCall, sensorSync, photoTransfer,
// videoUpload, firmwareUpdate, mapSync.
constexpr P kInMorning{0.25, 0.20, 0.25, 0.00, 0.10, 0.00, 0.00, 0.20};
constexpr P kInAfternoon{0.20, 0.20, 0.25, 0.20, 0.15, 0.00, 0.00, 0.00};
constexpr P kInEvening{0.10, 0.20, 0.20, 0.00, 0.20, 0.30, 0.00, 0.00};
constexpr P kInNight{0.10, 0.00, 0.00, 0.30, 0.10, 0.00, 0.40, 0.10};

constexpr P kOodMorning{0.25, 0.20, 0.30, 0.00, 0.15, 0.10, 0.00, 0.00};
constexpr P kOodAfternoon{0.25, 0.20, 0.25, 0.00, 0.20, 0.10, 0.00, 0.00};
constexpr P kOodEvening{0.05, 0.15, 0.25, 0.00, 0.20, 0.35, 0.00, 0.00};
constexpr P kOodNight{0.20, 0.15, 0.25, 0.00, 0.10, 0.30, 0.00, 0.00};

void drain(double& battery, double amount) {
  if (battery > kBatteryFloorPct) battery = std::max(kBatteryFloorPct, battery - amount);
}

}  // namespace

AppUsageProfile AppUsageProfile::in_distribution() {
  return AppUsageProfile{{kInMorning, kInAfternoon, kInEvening, kInNight}};
}

AppUsageProfile AppUsageProfile::out_of_distribution() {
  return AppUsageProfile{{kOodMorning, kOodAfternoon, kOodEvening, kOodNight}};
}

void AppUsageProfile::validate() const {
  for (std::size_t t = 0; t < kNumTimes; ++t) {
    double sum = 0.0;
    for (double p : probability[t]) {
      if (!(p >= 0.0)) throw ValidationError("app probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("app probabilities for " +
                            std::string(name(static_cast<TimeOfDay>(t))) + " must sum to 1");
    }
  }
}

void DatasetConfig::validate() const {
  if (window < 1) throw ValidationError("window must be >= 1");
  if (logs_per_session < window) throw ValidationError("logs_per_session must be >= window");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw ValidationError("split_fraction must lie in (0,1)");
  }
  if (!(sample_interval_s > 0.0)) throw ValidationError("sample_interval_s must be > 0");
  for (const auto& r : battery_ranges) {
    if (!(r.lo > 0.0 && r.lo < r.hi && r.hi <= 100.0)) {
      throw ValidationError("battery ranges must satisfy 0 < lo < hi <= 100");
    }
  }
}

std::pair<BatteryClass, BatteryClass> battery_classes(BatteryConfig config) {
  switch (config) {
    case BatteryConfig::bothHigh: return {BatteryClass::high, BatteryClass::high};
    case BatteryConfig::bothMedium: return {BatteryClass::medium, BatteryClass::medium};
    case BatteryConfig::bothLow: return {BatteryClass::low, BatteryClass::low};
    case BatteryConfig::pubHighSubLow: return {BatteryClass::high, BatteryClass::low};
  }
  throw std::invalid_argument("bad battery config");
}

AppType sample_app(const AppUsageProfile& profile, TimeOfDay time, std::mt19937_64& rng) {
  const auto& p = profile.probability[code(time)];
  std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
  return static_cast<AppType>(dist(rng));
}

std::vector<Sample> generate_session(const Scenario& scenario, const AppUsageProfile& profile,
                                     const LinkModelConfig& link, const DatasetConfig& cfg,
                                     const RewardConfig& reward_cfg, const ToleranceTable& tol,
                                     std::mt19937_64& rng) {
  const auto [pub_class, sub_class] = battery_classes(scenario.battery);
  auto draw_battery = [&](BatteryClass c) {
    const auto& r = cfg.battery_ranges[code(c)];
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  };
  double pub = draw_battery(pub_class);
  double sub = draw_battery(sub_class);
  const double hours_per_step = cfg.sample_interval_s / 3600.0;

  std::vector<Sample> out;
  out.reserve(cfg.logs_per_session);
  std::vector<AppType> history;
  for (std::size_t step = 0; step < cfg.logs_per_session; ++step) {
    const AppType app = sample_app(profile, scenario.time, rng);
    if (history.empty()) {
      history.assign(cfg.window, app);
    } else {
      history.erase(history.begin());
      history.push_back(app);
    }
    Sample s;
    s.scenario = scenario;
    s.context.time = scenario.time;
    s.context.publisher_battery = pub;
    s.context.subscriber_battery = sub;
    s.context.app_history = history;
    s.context.step_index = step;
    s.measurements = measure(link, s.context, rng);
    s.rewards = compute_rewards(s.context, s.measurements, reward_cfg, tol);

    const double used = s.measurements.energy_pct_per_hour[argmax(s.rewards.objective)];
    drain(pub, used * hours_per_step);
    drain(sub, used * hours_per_step);
    out.push_back(std::move(s));
  }
  return out;
}

std::mt19937_64 session_rng(std::uint64_t seed, std::uint64_t stream, std::size_t scenario) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(scenario)};
  return std::mt19937_64(seq);
}

Dataset generate_dataset(const AppUsageProfile& profile, const LinkModelConfig& link,
                         const DatasetConfig& cfg, const RewardConfig& reward_cfg,
                         const ToleranceTable& tol, Stream stream) {
  profile.validate();
  link.validate();
  cfg.validate();
  reward_cfg.validate();
  tol.validate();
  std::vector<std::future<std::vector<Sample>>> jobs;
  for (std::size_t s = 0; s < kNumScenarios; ++s) {
    jobs.push_back(std::async(std::launch::async, [&, s] {
      auto rng = session_rng(cfg.seed, static_cast<std::uint64_t>(stream), s);
      return generate_session(Scenario::from_index(s), profile, link, cfg, reward_cfg, tol, rng);
    }));
  }
  Dataset out;
  out.reserve(kNumScenarios * cfg.logs_per_session);
  for (auto& job : jobs) {
    auto session = job.get();
    std::move(session.begin(), session.end(), std::back_inserter(out));
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction, std::mt19937_64& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("fraction must lie in (0,1)");
  std::array<std::vector<std::size_t>, kNumScenarios> by_scenario;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_scenario[dataset[i].scenario.index()].push_back(i);
  }
  std::vector<bool> in_train(dataset.size(), false);
  for (auto& idx : by_scenario) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < take; ++k) in_train[idx[k]] = true;
  }
  Dataset train, test;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (in_train[i] ? train : test).push_back(dataset[i]);
  }
  return {std::move(train), std::move(test)};
}

Dataset mask_peer(Dataset dataset) {
  for (auto& s : dataset) s.context.subscriber_battery.reset();
  return dataset;
}

Dataset relabel(Dataset dataset, const RewardConfig& cfg, const ToleranceTable& tol) {
  for (auto& s : dataset) s.rewards = compute_rewards(s.context, s.measurements, cfg, tol);
  return dataset;
}

double annotation_error(const Dataset& dataset, const RewardConfig& cfg, const ToleranceTable& tol) {
  double worst = 0.0;
  for (const auto& s : dataset) {
    const auto rv = compute_rewards(s.context, s.measurements, cfg, tol);
    for (std::size_t a = 0; a < kNumActions; ++a) {
      worst = std::max(worst, std::abs(rv.objective[a] - s.rewards.objective[a]));
    }
  }
  return worst;
}

std::string serialize_dataset(std::span<const Sample> dataset) {
  std::string body;
  for (const auto& s : dataset) {
    auto j = records::encode(s.context, s.measurements);
    j["rewards"] = s.rewards.objective;
    j["scenario"] = {{"time", name(s.scenario.time)}, {"battery_config", name(s.scenario.battery)}};
    body += j.dump();
    body += '\n';
  }
  return body;
}

void save_dataset(const std::filesystem::path& path, std::span<const Sample> dataset) {
  io::write_file_atomic(path, serialize_dataset(dataset));
}

Dataset load_dataset(const std::filesystem::path& path, std::size_t window,
                     const RewardConfig& cfg, const ToleranceTable& tol) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  Dataset out;
  records::HistoryRebuilder rebuilder(window);
  std::string line;
  std::size_t line_no = 0;
  auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Sample s;
    try {
      const auto j = records::Json::parse(line);
      auto rec = records::decode(j);
      if (!rec.has_history) rebuilder.apply(rec.record.context, rec.current_app);
      s.context = std::move(rec.record.context);
      s.measurements = rec.record.measurements;
      const PerAction stored = records::decode_per_action(j, "rewards");
      auto sc = j.find("scenario");
      if (sc == j.end() || !sc->is_object()) throw ParseError("missing field 'scenario'");
      s.scenario.time = parse_enum<TimeOfDay>(sc->at("time").get<std::string>());
      s.scenario.battery = parse_enum<BatteryConfig>(sc->at("battery_config").get<std::string>());
      s.context.validate(window);
      s.measurements.validate();
      s.rewards = compute_rewards(s.context, s.measurements, cfg, tol);
      s.rewards.objective = stored;
    } catch (const records::Json::exception& e) {
      throw ParseError(where() + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where() + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where() + e.what());
    } catch (const std::domain_error& e) {
      throw ValidationError(where() + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace wapsel
