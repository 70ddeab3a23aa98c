#include "wapsel/eval.hpp"

#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>

#include "wapsel/io.hpp"

namespace wapsel {
namespace {

void add(Metrics& acc, const Metrics& m) {
  acc.objective += m.objective;
  acc.latency_score += m.latency_score;
  acc.energy_score += m.energy_score;
  acc.latency_ms += m.latency_ms;
  acc.energy_pct_h += m.energy_pct_h;
}

Metrics scaled(Metrics m, double s) {
  m.objective *= s;
  m.latency_score *= s;
  m.energy_score *= s;
  m.latency_ms *= s;
  m.energy_pct_h *= s;
  return m;
}

Metrics difference(const Metrics& a, const Metrics& b) {
  Metrics d = a;
  add(d, scaled(b, -1.0));
  return d;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

AblationArm run_arm(std::string arm, const Dataset& train_set, const Dataset& test_set,
                    const Dataset& coop, const TrainConfig& cfg, bool mask_peer,
                    const RewardConfig& metric, const ToleranceTable& tol) {
  auto model = HeadModel::initialized(cfg.layers, cfg.hidden, cfg.seed);
  auto result = train(train_set, std::move(model), cfg);
  HeadPolicy head(std::move(result.model), "head-" + arm, mask_peer);
  return AblationArm{std::move(arm), evaluate(head, test_set, metric, tol),
                     evaluate(head, coop, metric, tol)};
}

}  // namespace

double metric_value(const Metrics& m, std::string_view metric) {
  if (metric == "objective") return m.objective;
  if (metric == "latency_score") return m.latency_score;
  if (metric == "energy_score") return m.energy_score;
  if (metric == "latency_ms") return m.latency_ms;
  if (metric == "energy_pct_h") return m.energy_pct_h;
  throw std::out_of_range("unknown metric '" + std::string(metric) + "'");
}

const PolicyReport& EvalReport::at(std::string_view policy) const {
  for (const auto& p : policies) {
    if (p.policy == policy) return p;
  }
  throw std::out_of_range("no report for policy '" + std::string(policy) + "'");
}

PolicyReport evaluate(const Policy& policy, const Dataset& dataset, const RewardConfig& metric,
                      const ToleranceTable& tol) {
  if (dataset.empty()) throw std::invalid_argument("cannot evaluate on an empty slice");
  PolicyReport report;
  report.policy = policy.name();
  report.samples = dataset.size();
  report.decisions.reserve(dataset.size());

  std::array<Metrics, kNumScenarios> sums{};
  std::array<std::size_t, kNumScenarios> counts{};
  Metrics total;
  for (const auto& s : dataset) {
    const RewardVector rv = compute_rewards(s.context, s.measurements, metric, tol);
    const std::size_t a = policy.decide(s.context, rv.objective).index();
    report.decisions.push_back(static_cast<std::uint8_t>(a));
    const Metrics m{rv.objective[a], rv.latency_score[a], rv.energy_score[a],
                    s.measurements.latency_ms[a], s.measurements.energy_pct_per_hour[a]};
    add(total, m);
    add(sums[s.scenario.index()], m);
    ++counts[s.scenario.index()];
  }
  report.mean = scaled(total, 1.0 / static_cast<double>(dataset.size()));
  Metrics scenario_total;
  std::size_t scenarios = 0;
  for (std::size_t k = 0; k < kNumScenarios; ++k) {
    if (counts[k] == 0) continue;
    ScenarioMetrics sm{Scenario::from_index(k), counts[k],
                       scaled(sums[k], 1.0 / static_cast<double>(counts[k]))};
    add(scenario_total, sm.mean);
    ++scenarios;
    report.per_scenario.push_back(sm);
  }
  report.scenario_mean = scaled(scenario_total, 1.0 / static_cast<double>(scenarios));
  return report;
}

EvalReport evaluate_all(std::span<const Policy* const> policies, const Dataset& dataset,
                        const RewardConfig& metric, const ToleranceTable& tol, std::string slice) {
  if (dataset.empty()) throw std::invalid_argument("cannot evaluate on an empty slice");
  std::vector<std::future<PolicyReport>> jobs;
  for (const Policy* p : policies) {
    jobs.push_back(std::async(std::launch::async, [&, p] { return evaluate(*p, dataset, metric, tol); }));
  }
  EvalReport report;
  report.slice = std::move(slice);
  report.dataset_hash = dataset_hash(dataset);
  for (auto& j : jobs) report.policies.push_back(j.get());
  return report;
}

Dataset cooperative_slice(const Dataset& dataset) {
  Dataset out;
  for (const auto& s : dataset) {
    if (s.scenario.battery == BatteryConfig::pubHighSubLow) out.push_back(s);
  }
  return out;
}

std::string dataset_hash(const Dataset& dataset) { return io::sha256_hex(serialize_dataset(dataset)); }

Metrics AblationReport::aggregate_delta() const {
  return difference(treatment.aggregate.mean, control.aggregate.mean);
}

Metrics AblationReport::cooperative_delta() const {
  return difference(treatment.cooperative.mean, control.cooperative.mean);
}

AblationReport ablate_peer_info(const Dataset& train_set, const Dataset& test_set,
                                const TrainConfig& cfg, const RewardConfig& metric,
                                const ToleranceTable& tol) {
  const Dataset coop = cooperative_slice(test_set);
  AblationReport r;
  r.name = "peer_info";
  r.test_hash = dataset_hash(test_set);
  r.treatment = run_arm("with-peer", train_set, test_set, coop, cfg, false, metric, tol);
  r.control = run_arm("without-peer", mask_peer(train_set), test_set, coop, cfg, true, metric, tol);
  return r;
}

AblationReport ablate_reward(const Dataset& train_set, const Dataset& test_set,
                             const TrainConfig& cfg, const RewardConfig& metric,
                             const ToleranceTable& tol) {
  const Dataset coop = cooperative_slice(test_set);
  RewardConfig aware = metric;
  aware.mode = RewardMode::contextAware;
  RewardConfig naive = metric;
  naive.mode = RewardMode::naive;
  AblationReport r;
  r.name = "reward_design";
  r.test_hash = dataset_hash(test_set);
  r.treatment = run_arm("context-aware", relabel(train_set, aware, tol), test_set, coop, cfg, false, aware, tol);
  r.control = run_arm("naive", relabel(train_set, naive, tol), test_set, coop, cfg, false, aware, tol);
  return r;
}

RewardConfig single_objective_config(SingleObjective which, const RewardConfig& base) {
  RewardConfig cfg = base;
  cfg.mode = RewardMode::contextAware;
  if (which == SingleObjective::latencyOnly) {
    cfg.w_latency = 0.1;
    cfg.w_power = 0.0;
  } else {
    cfg.w_latency = 0.0;
    cfg.w_power = 1.0;
  }
  return cfg;
}

EvalReport single_objective_eval(const Dataset& train_set, const Dataset& test_set,
                                 SingleObjective which, const TrainConfig& cfg,
                                 const RewardConfig& base, const ToleranceTable& tol) {
  const RewardConfig metric = single_objective_config(which, base);
  auto model = HeadModel::initialized(cfg.layers, cfg.hidden, cfg.seed);
  auto trained = train(relabel(train_set, metric, tol), std::move(model), cfg);
  OraclePolicy oracle;
  RulePolicy rule;
  FixedPolicy rt(FixedVariant::rt_iv), bg(FixedVariant::bulk_bg);
  HeadPolicy head(std::move(trained.model), "head-" + std::string(name(cfg.loss)));
  const Policy* policies[] = {&oracle, &rule, &rt, &bg, &head};
  return evaluate_all(policies, test_set, metric, tol,
                      which == SingleObjective::latencyOnly ? "latency-only" : "energy-only");
}

std::string replay_snapshot(const Dataset& dataset, std::span<const Policy* const> policies,
                            const Scenario& filter, std::size_t max_steps,
                            const RewardConfig& metric, const ToleranceTable& tol) {
  std::ostringstream out;
  std::size_t total = 0;
  for (const auto& s : dataset) total += (s.scenario == filter) ? 1 : 0;
  const std::size_t shown = std::min(total, max_steps);
  out << "scenario " << to_string(filter) << ": " << shown << " of " << total << " steps\n";
  std::size_t printed = 0;
  for (const auto& s : dataset) {
    if (printed == shown) break;
    if (!(s.scenario == filter)) continue;
    ++printed;
    const auto& c = s.context;
    out << "\nstep " << c.step_index << "  time=" << name(c.time)
        << "  pub_battery=" << fixed(c.publisher_battery, 1) << "%"
        << "  sub_battery=" << (c.subscriber_battery ? fixed(*c.subscriber_battery, 1) + "%" : "hidden")
        << "  app=" << name(c.current_app()) << "\n  history=[";
    for (std::size_t i = 0; i < c.app_history.size(); ++i) {
      out << (i ? ", " : "") << name(c.app_history[i]);
    }
    out << "]\n";
    const RewardVector rv = compute_rewards(c, s.measurements, metric, tol);
    for (const Policy* p : policies) {
      const Action a = p->decide(c, rv.objective);
      const std::size_t k = a.index();
      char line[256];
      std::snprintf(line, sizeof line, "  %-16s -> %-32s objective=%9.4f latency=%8.3f ms energy=%6.3f %%/h\n",
                    p->name().c_str(), to_string(a).c_str(), rv.objective[k],
                    s.measurements.latency_ms[k], s.measurements.energy_pct_per_hour[k]);
      out << line;
    }
  }
  return out.str();
}

nlohmann::ordered_json to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  for (auto key : kMetricNames) j[std::string(key)] = metric_value(m, key);
  return j;
}

nlohmann::ordered_json to_json(const PolicyReport& r) {
  nlohmann::ordered_json j;
  j["policy"] = r.policy;
  j["samples"] = r.samples;
  j["per_sample_mean"] = to_json(r.mean);
  j["per_scenario_mean"] = to_json(r.scenario_mean);
  auto scenarios = nlohmann::ordered_json::array();
  for (const auto& s : r.per_scenario) {
    nlohmann::ordered_json sj;
    sj["time"] = name(s.scenario.time);
    sj["battery_config"] = name(s.scenario.battery);
    sj["samples"] = s.samples;
    sj["mean"] = to_json(s.mean);
    scenarios.push_back(std::move(sj));
  }
  j["scenarios"] = std::move(scenarios);
  return j;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["slice"] = r.slice;
  j["dataset_hash"] = r.dataset_hash;
  j["config_hash"] = r.config_hash;
  auto policies = nlohmann::ordered_json::array();
  for (const auto& p : r.policies) policies.push_back(to_json(p));
  j["policies"] = std::move(policies);
  return j;
}

nlohmann::ordered_json to_json(const AblationReport& r) {
  auto arm = [](const AblationArm& a) {
    nlohmann::ordered_json j;
    j["arm"] = a.arm;
    j["aggregate"] = to_json(a.aggregate.mean);
    j["cooperative"] = to_json(a.cooperative.mean);
    return j;
  };
  nlohmann::ordered_json j;
  j["ablation"] = r.name;
  j["test_hash"] = r.test_hash;
  j["treatment"] = arm(r.treatment);
  j["control"] = arm(r.control);
  j["aggregate_delta"] = to_json(r.aggregate_delta());
  j["cooperative_delta"] = to_json(r.cooperative_delta());
  return j;
}

std::string flat_table(std::span<const EvalReport> reports) {
  std::string out = "policy\tslice\tmetric\tper_sample_mean\tper_scenario_mean\n";
  for (const auto& r : reports) {
    for (const auto& p : r.policies) {
      for (auto metric : kMetricNames) {
        out += p.policy + "\t" + r.slice + "\t" + std::string(metric) + "\t" +
               fixed(metric_value(p.mean, metric)) + "\t" + fixed(metric_value(p.scenario_mean, metric)) + "\n";
      }
    }
  }
  return out;
}

}  // namespace wapsel
