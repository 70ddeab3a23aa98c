#include "wapsel/domain.hpp"

#include <algorithm>
#include <stdexcept>

#include "wapsel/errors.hpp"

namespace wapsel {
namespace {

constexpr std::array<std::string_view, kNumModes> kModeNames{"realtime", "bulk"};
constexpr std::array<std::string_view, kNumCategories> kCategoryNames{
    "bestEffort", "background", "interactiveVideo", "interactiveVoice"};
constexpr std::array<std::string_view, kNumApps> kAppNames{
    "textMessage", "voiceChat",   "videoCall",      "sensorSync",
    "photoTransfer", "videoUpload", "firmwareUpdate", "mapSync"};
constexpr std::array<std::string_view, kNumTimes> kTimeNames{"morning", "afternoon", "evening",
                                                             "night"};
constexpr std::array<std::string_view, kNumBatteryClasses> kBatteryClassNames{"high", "medium",
                                                                              "low"};
constexpr std::array<std::string_view, kNumBatteryConfigs> kBatteryConfigNames{
    "bothHigh", "bothMedium", "bothLow", "pubHighSubLow"};

template <typename E, std::size_t N>
E lookup(const std::array<std::string_view, N>& names, std::string_view text, const char* what) {
  auto it = std::find(names.begin(), names.end(), text);
  if (it == names.end()) {
    throw ParseError("unknown " + std::string(what) + " '" + std::string(text) + "'");
  }
  return static_cast<E>(it - names.begin());
}

}  // namespace

std::string_view name(PerformanceMode v) { return kModeNames.at(code(v)); }
std::string_view name(AccessCategory v) { return kCategoryNames.at(code(v)); }
std::string_view name(AppType v) { return kAppNames.at(code(v)); }
std::string_view name(TimeOfDay v) { return kTimeNames.at(code(v)); }
std::string_view name(BatteryClass v) { return kBatteryClassNames.at(code(v)); }
std::string_view name(BatteryConfig v) { return kBatteryConfigNames.at(code(v)); }

template <>
PerformanceMode parse_enum<PerformanceMode>(std::string_view text) {
  return lookup<PerformanceMode>(kModeNames, text, "performance mode");
}
template <>
AccessCategory parse_enum<AccessCategory>(std::string_view text) {
  return lookup<AccessCategory>(kCategoryNames, text, "access category");
}
template <>
AppType parse_enum<AppType>(std::string_view text) {
  return lookup<AppType>(kAppNames, text, "app type");
}
template <>
TimeOfDay parse_enum<TimeOfDay>(std::string_view text) {
  return lookup<TimeOfDay>(kTimeNames, text, "time of day");
}
template <>
BatteryClass parse_enum<BatteryClass>(std::string_view text) {
  return lookup<BatteryClass>(kBatteryClassNames, text, "battery class");
}
template <>
BatteryConfig parse_enum<BatteryConfig>(std::string_view text) {
  return lookup<BatteryConfig>(kBatteryConfigNames, text, "battery config");
}

Action action_from_index(std::size_t index) {
  if (index >= kNumActions) {
    throw std::out_of_range("action index " + std::to_string(index) + " outside [0,7]");
  }
  return Action{static_cast<PerformanceMode>(index / kNumCategories),
                static_cast<AccessCategory>(index % kNumCategories)};
}

std::array<Action, kNumActions> all_actions() {
  std::array<Action, kNumActions> out{};
  for (std::size_t i = 0; i < kNumActions; ++i) out[i] = action_from_index(i);
  return out;
}

std::string to_string(const Action& a) {
  return "(" + std::string(name(a.mode)) + ", " + std::string(name(a.category)) + ")";
}

Scenario Scenario::from_index(std::size_t index) {
  if (index >= kNumScenarios) {
    throw std::out_of_range("scenario index " + std::to_string(index) + " outside [0,15]");
  }
  return Scenario{static_cast<TimeOfDay>(index / kNumBatteryConfigs),
                  static_cast<BatteryConfig>(index % kNumBatteryConfigs)};
}

std::string to_string(const Scenario& s) {
  return "(" + std::string(name(s.time)) + ", " + std::string(name(s.battery)) + ")";
}

void Context::validate(std::size_t window) const {
  if (window == 0) throw ValidationError("history window must be >= 1");
  if (app_history.size() != window) {
    throw ValidationError("app history has length " + std::to_string(app_history.size()) +
                          ", expected " + std::to_string(window));
  }
  auto in_range = [](double b) { return b >= 0.0 && b <= 100.0; };
  if (!in_range(publisher_battery)) {
    throw ValidationError("publisher battery outside [0,100]");
  }
  if (subscriber_battery && !in_range(*subscriber_battery)) {
    throw ValidationError("subscriber battery outside [0,100]");
  }
}

std::size_t argmax(const PerAction& values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::size_t argmin(const PerAction& values) {
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

}  // namespace wapsel
