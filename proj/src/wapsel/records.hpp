#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "wapsel/domain.hpp"
#include "wapsel/measurement.hpp"

namespace wapsel::records {

using Json = nlohmann::ordered_json;

// Fields {step, time, app, history, pub_battery, sub_battery, pub_device,
// sub_device, latency_ms[8], energy_pct_h[8]}; absent optionals become null.
Json encode(const Context& context, const MeasurementVector& mv);

PerAction decode_per_action(const Json& j, const char* key);

struct DecodedRecord {
  LogRecord record;
  AppType current_app = AppType::textMessage;
  bool has_history = false;  // false: record.context.app_history is empty
};

// Parses one record. Throws ParseError (without line number; callers prefix it).
DecodedRecord decode(const Json& j);

// Rebuilds rolling history windows for records that lack one.
class HistoryRebuilder {
 public:
  explicit HistoryRebuilder(std::size_t window) : window_(window) {}

  // Sets context.app_history to the rolling window ending at `current`.
  void apply(Context& context, AppType current);

 private:
  std::size_t window_;
  std::vector<AppType> seen_;
  std::optional<std::uint64_t> last_step_;
};

}  // namespace wapsel::records
