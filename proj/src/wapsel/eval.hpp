#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wapsel/datagen.hpp"
#include "wapsel/policy.hpp"
#include "wapsel/trainer.hpp"

namespace wapsel {

struct Metrics {
  double objective = 0.0;      // R(p) of the chosen action
  double latency_score = 0.0;  // mean over the app window
  double energy_score = 0.0;   // mean over devices of b_d / E(p)
  double latency_ms = 0.0;     // raw latency of the chosen action
  double energy_pct_h = 0.0;   // raw energy use of the chosen action
};

inline constexpr std::array<std::string_view, 5> kMetricNames{
    "objective", "latency_score", "energy_score", "latency_ms", "energy_pct_h"};
double metric_value(const Metrics& m, std::string_view metric);

struct ScenarioMetrics {
  Scenario scenario;
  std::size_t samples = 0;
  Metrics mean;
};

struct PolicyReport {
  std::string policy;
  std::size_t samples = 0;
  Metrics mean;           // per-sample average
  Metrics scenario_mean;  // average of the per-scenario averages
  std::vector<ScenarioMetrics> per_scenario;
  std::vector<std::uint8_t> decisions;  // action index per sample
};

struct EvalReport {
  std::string slice;
  std::string dataset_hash;
  std::string config_hash;
  std::vector<PolicyReport> policies;

  // Throws std::out_of_range for unknown names.
  const PolicyReport& at(std::string_view policy) const;
};

// Scores every decision with the objective recomputed from raw measurements
// under `metric` using both devices present in the context. Throws
// std::invalid_argument on an empty dataset.
PolicyReport evaluate(const Policy& policy, const Dataset& dataset, const RewardConfig& metric,
                      const ToleranceTable& tol);

// Evaluates policies concurrently on one slice.
EvalReport evaluate_all(std::span<const Policy* const> policies, const Dataset& dataset,
                        const RewardConfig& metric, const ToleranceTable& tol, std::string slice);

// Samples from the publisher-high / subscriber-low scenarios.
Dataset cooperative_slice(const Dataset& dataset);

std::string dataset_hash(const Dataset& dataset);

struct AblationArm {
  std::string arm;
  PolicyReport aggregate;
  PolicyReport cooperative;
};

struct AblationReport {
  std::string name;
  AblationArm treatment;  // w/ peer info, or context-aware reward
  AblationArm control;    // w/o peer info, or naive reward
  std::string test_hash;  // both arms score this exact slice

  Metrics aggregate_delta() const;    // treatment - control
  Metrics cooperative_delta() const;  // treatment - control
};

// Two heads with identical seed/config: one on the training set, one on its
// peer-masked copy. Both are scored on the unmasked test set.
AblationReport ablate_peer_info(const Dataset& train_set, const Dataset& test_set,
                                const TrainConfig& cfg, const RewardConfig& metric,
                                const ToleranceTable& tol);

// Two heads trained on context-aware vs naive labels, both scored with the
// context-aware objective.
AblationReport ablate_reward(const Dataset& train_set, const Dataset& test_set,
                             const TrainConfig& cfg, const RewardConfig& metric,
                             const ToleranceTable& tol);

enum class SingleObjective { latencyOnly, energyOnly };

// Reward config with (w_L, w_P) = (0.1, 0) or (0, 1.0).
RewardConfig single_objective_config(SingleObjective which, const RewardConfig& base);

// Relabels with the single-objective weights, trains a head on the labels and
// evaluates oracle, rule, both fixed policies and the head under the same weights.
EvalReport single_objective_eval(const Dataset& train_set, const Dataset& test_set,
                                 SingleObjective which, const TrainConfig& cfg,
                                 const RewardConfig& base, const ToleranceTable& tol);

// Plain-text transcript of context and per-policy decisions for the samples
// of one scenario (at most max_steps of them).
std::string replay_snapshot(const Dataset& dataset, std::span<const Policy* const> policies,
                            const Scenario& filter, std::size_t max_steps,
                            const RewardConfig& metric, const ToleranceTable& tol);

nlohmann::ordered_json to_json(const Metrics& m);
nlohmann::ordered_json to_json(const PolicyReport& r);
nlohmann::ordered_json to_json(const EvalReport& r);
nlohmann::ordered_json to_json(const AblationReport& r);

// One row per policy x metric: policy, slice, metric, per-sample mean, per-scenario mean.
std::string flat_table(std::span<const EvalReport> reports);

}  // namespace wapsel
