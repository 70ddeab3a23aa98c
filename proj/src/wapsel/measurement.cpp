#include "wapsel/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wapsel/errors.hpp"
#include "wapsel/io.hpp"
#include "wapsel/records.hpp"

namespace wapsel {

void MeasurementVector::validate() const {
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (!(latency_ms[a] >= 0.0) || !std::isfinite(latency_ms[a])) {
      throw ValidationError("latency for action " + std::to_string(a) + " must be >= 0");
    }
    if (!(energy_pct_per_hour[a] > 0.0) || !std::isfinite(energy_pct_per_hour[a])) {
      throw ValidationError("energy for action " + std::to_string(a) + " must be > 0");
    }
  }
}

LinkModelConfig LinkModelConfig::defaults() {
  LinkModelConfig c;
  c.base_latency_ms = {6.0, 9.0, 5.0, 4.0, 12.0, 18.0, 10.0, 8.0};
  c.base_energy_pct_per_hour = {3.4, 3.0, 3.6, 3.7, 2.9, 2.5, 3.1, 3.2};
  c.time_latency_multiplier = {1.0, 1.3, 1.9, 3.1};
  c.latency_noise_sigma = 0.25;
  c.energy_noise_sigma = 0.10;
  return c;
}

LinkModelConfig LinkModelConfig::noiseless() const {
  LinkModelConfig c = *this;
  c.latency_noise_sigma = 0.0;
  c.energy_noise_sigma = 0.0;
  return c;
}

void LinkModelConfig::validate() const {
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (!(base_latency_ms[a] > 0.0)) throw ValidationError("base latency must be > 0");
    if (!(base_energy_pct_per_hour[a] > 0.0)) throw ValidationError("base energy must be > 0");
  }
  for (double m : time_latency_multiplier) {
    if (!(m > 0.0)) throw ValidationError("time latency multiplier must be > 0");
  }
  if (!(latency_noise_sigma >= 0.0) || !(energy_noise_sigma >= 0.0)) {
    throw ValidationError("noise sigmas must be >= 0");
  }
  auto idx = [](PerformanceMode m, AccessCategory c) { return Action{m, c}.index(); };
  const auto bg = AccessCategory::background;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    auto cat = static_cast<AccessCategory>(c);
    if (!(base_latency_ms[idx(PerformanceMode::realtime, cat)] <
          base_latency_ms[idx(PerformanceMode::bulk, cat)])) {
      throw ValidationError("realtime latency must be below bulk latency for " +
                            std::string(name(cat)));
    }
    if (base_energy_pct_per_hour[idx(PerformanceMode::bulk, cat)] >
        base_energy_pct_per_hour[idx(PerformanceMode::realtime, cat)]) {
      throw ValidationError("bulk energy must not exceed realtime energy for " +
                            std::string(name(cat)));
    }
    for (std::size_t m = 0; m < kNumModes; ++m) {
      auto mode = static_cast<PerformanceMode>(m);
      if (base_energy_pct_per_hour[idx(mode, bg)] > base_energy_pct_per_hour[idx(mode, cat)]) {
        throw ValidationError("background energy must be minimal within " +
                              std::string(name(mode)));
      }
    }
  }
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (a != kBulkBackground.index() &&
        !(base_energy_pct_per_hour[kBulkBackground.index()] < base_energy_pct_per_hour[a])) {
      throw ValidationError("(bulk, background) must have strictly minimal energy");
    }
    if (a != kRealtimeVoice.index() &&
        !(base_latency_ms[kRealtimeVoice.index()] < base_latency_ms[a])) {
      throw ValidationError("(realtime, interactiveVoice) must have strictly minimal latency");
    }
  }
}

MeasurementVector measure(const LinkModelConfig& config, const Context& context,
                          std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  const double multiplier = config.time_latency_multiplier[code(context.time)];
  MeasurementVector mv;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    const double zl = z(rng);
    const double ze = z(rng);
    mv.latency_ms[a] = config.base_latency_ms[a] * multiplier * std::exp(config.latency_noise_sigma * zl);
    mv.energy_pct_per_hour[a] = config.base_energy_pct_per_hour[a] *
                                std::max(kEnergyNoiseFloor, 1.0 + config.energy_noise_sigma * ze);
  }
  return mv;
}

std::vector<LogRecord> ingest_log(const std::filesystem::path& path, std::size_t window) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open log '" + path.string() + "'");
  std::vector<LogRecord> out;
  records::HistoryRebuilder rebuilder(window);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records::DecodedRecord rec;
    try {
      rec = records::decode(records::Json::parse(line));
    } catch (const records::Json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.has_history) rebuilder.apply(rec.record.context, rec.current_app);
    try {
      rec.record.context.validate(window);
      rec.record.measurements.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(rec.record));
  }
  return out;
}

void export_log(const std::filesystem::path& path, std::span<const LogRecord> rows) {
  std::string body;
  for (const auto& r : rows) {
    body += records::encode(r.context, r.measurements).dump();
    body += '\n';
  }
  io::write_file_atomic(path, body);
}

}  // namespace wapsel
