#include "wapsel/records.hpp"

#include "wapsel/errors.hpp"

namespace wapsel::records {
namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_string(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

std::optional<std::string> optional_text(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(std::string("field '") + key + "' is not a string");
  return it->get<std::string>();
}

std::string text(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

}  // namespace

Json encode(const Context& context, const MeasurementVector& mv) {
  Json history = Json::array();
  for (AppType a : context.app_history) history.push_back(name(a));
  Json j;
  j["step"] = context.step_index;
  j["time"] = name(context.time);
  j["app"] = name(context.current_app());
  j["history"] = std::move(history);
  j["pub_battery"] = context.publisher_battery;
  j["sub_battery"] = optional_number(context.subscriber_battery);
  j["pub_device"] = optional_string(context.publisher_device);
  j["sub_device"] = optional_string(context.subscriber_device);
  j["latency_ms"] = mv.latency_ms;
  j["energy_pct_h"] = mv.energy_pct_per_hour;
  return j;
}

PerAction decode_per_action(const Json& j, const char* key) {
  const Json& arr = require(j, key);
  if (!arr.is_array() || arr.size() != kNumActions) {
    throw ParseError(std::string("field '") + key + "' must be an array of 8 numbers");
  }
  PerAction out{};
  for (std::size_t i = 0; i < kNumActions; ++i) {
    if (!arr[i].is_number()) throw ParseError(std::string("field '") + key + "' has a non-number");
    out[i] = arr[i].get<double>();
  }
  return out;
}

DecodedRecord decode(const Json& j) {
  if (!j.is_object()) throw ParseError("record is not an object");
  DecodedRecord out;
  LogRecord& r = out.record;
  const Json& step = require(j, "step");
  if (!step.is_number_unsigned() && !(step.is_number_integer() && step.get<long long>() >= 0)) {
    throw ParseError("field 'step' must be a non-negative integer");
  }
  r.context.step_index = step.get<std::uint64_t>();
  r.context.time = parse_enum<TimeOfDay>(text(j, "time"));
  r.context.publisher_battery = number(j, "pub_battery");
  auto sub = j.find("sub_battery");
  if (sub != j.end() && !sub->is_null()) {
    if (!sub->is_number()) throw ParseError("field 'sub_battery' is not a number");
    r.context.subscriber_battery = sub->get<double>();
  }
  r.context.publisher_device = optional_text(j, "pub_device");
  r.context.subscriber_device = optional_text(j, "sub_device");
  out.current_app = parse_enum<AppType>(text(j, "app"));
  auto hist = j.find("history");
  if (hist != j.end() && !hist->is_null()) {
    if (!hist->is_array() || hist->empty()) throw ParseError("field 'history' must be a non-empty array");
    for (const auto& h : *hist) {
      if (!h.is_string()) throw ParseError("field 'history' has a non-string entry");
      r.context.app_history.push_back(parse_enum<AppType>(h.get<std::string>()));
    }
    if (r.context.app_history.back() != out.current_app) {
      throw ParseError("field 'app' disagrees with the last history entry");
    }
    out.has_history = true;
  }
  r.measurements.latency_ms = decode_per_action(j, "latency_ms");
  r.measurements.energy_pct_per_hour = decode_per_action(j, "energy_pct_h");
  return out;
}

void HistoryRebuilder::apply(Context& context, AppType current) {
  bool new_session = !last_step_ || context.step_index == 0 || context.step_index != *last_step_ + 1;
  if (new_session) seen_.clear();
  last_step_ = context.step_index;
  if (seen_.empty()) seen_.assign(window_, current);
  seen_.erase(seen_.begin());
  seen_.push_back(current);
  context.app_history = seen_;
}

}  // namespace wapsel::records
