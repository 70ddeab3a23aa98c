#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wapsel/domain.hpp"
#include "wapsel/reward.hpp"

namespace wapsel {

// A decision rule over one context. `truth` is the ground-truth objective for
// the step; only the oracle may read it.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Action decide(const Context& context, const PerAction& truth) const = 0;
};

using PreferredTupleTable = std::array<Action, kNumApps>;
PreferredTupleTable default_preferred_tuples();

// Highest objective, lowest index on ties.
Action oracle_decide(const PerAction& objective);

// Modal preferred tuple over the window, lowest index on ties.
// Throws std::invalid_argument on an empty history.
Action rule_decide(std::span<const AppType> history, const PreferredTupleTable& table);

enum class FixedVariant { rt_iv, bulk_bg };
Action fixed_decide(FixedVariant variant);

class OraclePolicy final : public Policy {
 public:
  std::string name() const override { return "oracle"; }
  Action decide(const Context&, const PerAction& truth) const override { return oracle_decide(truth); }
};

class RulePolicy final : public Policy {
 public:
  explicit RulePolicy(PreferredTupleTable table = default_preferred_tuples()) : table_(table) {}
  std::string name() const override { return "rule"; }
  Action decide(const Context& context, const PerAction&) const override {
    return rule_decide(context.app_history, table_);
  }

 private:
  PreferredTupleTable table_;
};

class FixedPolicy final : public Policy {
 public:
  explicit FixedPolicy(FixedVariant variant) : variant_(variant) {}
  std::string name() const override {
    return variant_ == FixedVariant::rt_iv ? "fix-rt-iv" : "fix-bulk-bg";
  }
  Action decide(const Context&, const PerAction&) const override { return fixed_decide(variant_); }

 private:
  FixedVariant variant_;
};

// Names accepted on the command line.
inline constexpr std::array<std::string_view, 5> kPolicyNames{"oracle", "rule", "fix-rt-iv",
                                                              "fix-bulk-bg", "head"};

// Builds a non-learned policy by name; returns nullptr for "head" or unknown names.
std::unique_ptr<Policy> make_baseline_policy(std::string_view name);

}  // namespace wapsel
