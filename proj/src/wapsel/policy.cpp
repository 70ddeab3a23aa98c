#include "wapsel/policy.hpp"

#include <stdexcept>

namespace wapsel {

PreferredTupleTable default_preferred_tuples() {
  using M = PerformanceMode;
  using C = AccessCategory;
  return {
      Action{M::realtime, C::bestEffort},        // textMessage
      Action{M::realtime, C::interactiveVoice},  // voiceChat
      Action{M::realtime, C::interactiveVideo},  // videoCall
      Action{M::bulk, C::background},            // sensorSync
      Action{M::bulk, C::bestEffort},            // photoTransfer
      Action{M::bulk, C::bestEffort},            // videoUpload
      Action{M::bulk, C::background},            // firmwareUpdate
      Action{M::realtime, C::bestEffort},        // mapSync
  };
}

Action oracle_decide(const PerAction& objective) { return action_from_index(argmax(objective)); }

Action rule_decide(std::span<const AppType> history, const PreferredTupleTable& table) {
  if (history.empty()) throw std::invalid_argument("rule policy needs a non-empty app history");
  std::array<std::size_t, kNumActions> votes{};
  for (AppType app : history) ++votes[table[code(app)].index()];
  std::size_t best = 0;
  for (std::size_t a = 1; a < kNumActions; ++a) {
    if (votes[a] > votes[best]) best = a;
  }
  return action_from_index(best);
}

Action fixed_decide(FixedVariant variant) {
  return variant == FixedVariant::rt_iv ? kRealtimeVoice : kBulkBackground;
}

std::unique_ptr<Policy> make_baseline_policy(std::string_view name) {
  if (name == "oracle") return std::make_unique<OraclePolicy>();
  if (name == "rule") return std::make_unique<RulePolicy>();
  if (name == "fix-rt-iv") return std::make_unique<FixedPolicy>(FixedVariant::rt_iv);
  if (name == "fix-bulk-bg") return std::make_unique<FixedPolicy>(FixedVariant::bulk_bg);
  return nullptr;
}

}  // namespace wapsel
