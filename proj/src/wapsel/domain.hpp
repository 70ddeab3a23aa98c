#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wapsel {

inline constexpr std::size_t kNumModes = 2;
inline constexpr std::size_t kNumCategories = 4;
inline constexpr std::size_t kNumActions = kNumModes * kNumCategories;
inline constexpr std::size_t kNumApps = 8;
inline constexpr std::size_t kNumTimes = 4;
inline constexpr std::size_t kNumBatteryClasses = 3;
inline constexpr std::size_t kNumBatteryConfigs = 4;
inline constexpr std::size_t kNumScenarios = kNumTimes * kNumBatteryConfigs;
inline constexpr std::size_t kDefaultWindow = 10;

enum class PerformanceMode : std::uint8_t { realtime = 0, bulk = 1 };

enum class AccessCategory : std::uint8_t {
  bestEffort = 0,
  background = 1,
  interactiveVideo = 2,
  interactiveVoice = 3,
};

enum class AppType : std::uint8_t {
  textMessage = 0,
  voiceChat,
  videoCall,
  sensorSync,
  photoTransfer,
  videoUpload,
  firmwareUpdate,
  mapSync,
};

enum class TimeOfDay : std::uint8_t { morning = 0, afternoon, evening, night };

enum class BatteryClass : std::uint8_t { high = 0, medium, low };

enum class BatteryConfig : std::uint8_t { bothHigh = 0, bothMedium, bothLow, pubHighSubLow };

template <typename E>
constexpr std::size_t code(E e) {
  return static_cast<std::size_t>(e);
}

// Lower-camel names used in every file format.
std::string_view name(PerformanceMode v);
std::string_view name(AccessCategory v);
std::string_view name(AppType v);
std::string_view name(TimeOfDay v);
std::string_view name(BatteryClass v);
std::string_view name(BatteryConfig v);

// Inverse of name(); throws ParseError on unknown text.
template <typename E>
E parse_enum(std::string_view text);

template <>
PerformanceMode parse_enum<PerformanceMode>(std::string_view text);
template <>
AccessCategory parse_enum<AccessCategory>(std::string_view text);
template <>
AppType parse_enum<AppType>(std::string_view text);
template <>
TimeOfDay parse_enum<TimeOfDay>(std::string_view text);
template <>
BatteryClass parse_enum<BatteryClass>(std::string_view text);
template <>
BatteryConfig parse_enum<BatteryConfig>(std::string_view text);

// Canonical order is mode-major, category-minor: index = mode * 4 + category.
struct Action {
  PerformanceMode mode = PerformanceMode::realtime;
  AccessCategory category = AccessCategory::bestEffort;

  constexpr std::size_t index() const { return code(mode) * kNumCategories + code(category); }
  friend constexpr bool operator==(const Action&, const Action&) = default;
};

// Throws std::out_of_range for index > 7.
Action action_from_index(std::size_t index);
std::array<Action, kNumActions> all_actions();
std::string to_string(const Action& a);

inline constexpr Action kRealtimeVoice{PerformanceMode::realtime, AccessCategory::interactiveVoice};
inline constexpr Action kBulkBackground{PerformanceMode::bulk, AccessCategory::background};

struct Scenario {
  TimeOfDay time = TimeOfDay::morning;
  BatteryConfig battery = BatteryConfig::bothHigh;

  constexpr std::size_t index() const { return code(time) * kNumBatteryConfigs + code(battery); }
  static Scenario from_index(std::size_t index);
  friend constexpr bool operator==(const Scenario&, const Scenario&) = default;
};

std::string to_string(const Scenario& s);

using PerAction = std::array<double, kNumActions>;

// Observable state at one decision step.
struct Context {
  TimeOfDay time = TimeOfDay::morning;
  double publisher_battery = 100.0;
  std::optional<double> subscriber_battery;
  std::vector<AppType> app_history;  // oldest first; back() is the current app
  std::uint64_t step_index = 0;
  // Opaque labels; never enter features or rewards.
  std::optional<std::string> publisher_device;
  std::optional<std::string> subscriber_device;

  bool peer_visible() const { return subscriber_battery.has_value(); }
  AppType current_app() const { return app_history.back(); }

  // Throws ValidationError.
  void validate(std::size_t window) const;
};

// Lowest index wins ties.
std::size_t argmax(const PerAction& values);
std::size_t argmin(const PerAction& values);

}  // namespace wapsel
