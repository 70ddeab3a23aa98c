#include "wapsel/wapsel.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "wapsel/errors.hpp"
#include "wapsel/experiment.hpp"

struct wapsel_config {
  wapsel::ExperimentConfig cfg;
};

struct wapsel_dataset {
  wapsel::Dataset data;
};

struct wapsel_model {
  wapsel::Checkpoint ckpt;
};

struct wapsel_policy {
  std::unique_ptr<wapsel::Policy> impl;
};

namespace {

thread_local std::string g_last_error;

wapsel_status fail(wapsel_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body` and converts any exception to a status code.
template <typename F>
wapsel_status guarded(F&& body) {
  try {
    body();
    return WAPSEL_OK;
  } catch (const wapsel::ParseError& e) {
    return fail(WAPSEL_ERR_PARSE, e.what());
  } catch (const wapsel::ValidationError& e) {
    return fail(WAPSEL_ERR_VALIDATION, e.what());
  } catch (const wapsel::ConfigError& e) {
    return fail(WAPSEL_ERR_CONFIG, e.what());
  } catch (const wapsel::IoError& e) {
    return fail(WAPSEL_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(WAPSEL_ERR_IO, e.what());
  } catch (const wapsel::DivergenceError& e) {
    return fail(WAPSEL_ERR_DIVERGED, e.what());
  } catch (const wapsel::ArtifactMismatchError& e) {
    return fail(WAPSEL_ERR_MISMATCH, e.what());
  } catch (const std::out_of_range& e) {
    return fail(WAPSEL_ERR_RANGE, e.what());
  } catch (const std::domain_error& e) {
    return fail(WAPSEL_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(WAPSEL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WAPSEL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WAPSEL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WAPSEL_ERR_INTERNAL, "unknown error");
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw std::invalid_argument(std::string(what) + " must not be null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

template <typename E>
E enum_at(int code, std::size_t count) {
  if (code < 0 || static_cast<std::size_t>(code) >= count) {
    throw std::out_of_range("enum code " + std::to_string(code) + " out of range");
  }
  return static_cast<E>(code);
}

wapsel::Context to_context(const wapsel_context* c) {
  require(c, "context");
  if (c->history_len > 0) require(c->app_history, "context.app_history");
  wapsel::Context ctx;
  ctx.time = enum_at<wapsel::TimeOfDay>(c->time, wapsel::kNumTimes);
  ctx.publisher_battery = c->publisher_battery;
  if (c->has_subscriber) ctx.subscriber_battery = c->subscriber_battery;
  for (std::size_t i = 0; i < c->history_len; ++i) {
    ctx.app_history.push_back(enum_at<wapsel::AppType>(c->app_history[i], wapsel::kNumApps));
  }
  ctx.step_index = c->step_index;
  return ctx;
}

wapsel::PerAction to_per_action(const double* v) {
  wapsel::PerAction out{};
  for (std::size_t i = 0; i < wapsel::kNumActions; ++i) out[i] = v[i];
  return out;
}

void copy_out(const wapsel::PerAction& v, double* out) {
  if (out == nullptr) return;
  for (std::size_t i = 0; i < wapsel::kNumActions; ++i) out[i] = v[i];
}

wapsel::RewardConfig metric_config(const wapsel::ExperimentConfig& cfg, wapsel_metric metric) {
  switch (metric) {
    case WAPSEL_METRIC_CONFIG:
      return cfg.reward;
    case WAPSEL_METRIC_LATENCY_ONLY:
      return wapsel::single_objective_config(wapsel::SingleObjective::latencyOnly, cfg.reward);
    case WAPSEL_METRIC_ENERGY_ONLY:
      return wapsel::single_objective_config(wapsel::SingleObjective::energyOnly, cfg.reward);
  }
  throw std::invalid_argument("unknown metric");
}

std::vector<const wapsel::Policy*> unwrap(const wapsel_policy* const* policies, std::size_t count) {
  if (count == 0) throw std::invalid_argument("at least one policy is required");
  require(policies, "policies");
  std::vector<const wapsel::Policy*> out;
  for (std::size_t i = 0; i < count; ++i) {
    require(policies[i], "policy");
    out.push_back(policies[i]->impl.get());
  }
  return out;
}

}  // namespace

extern "C" {

const char* wapsel_status_name(wapsel_status status) {
  switch (status) {
    case WAPSEL_OK: return "ok";
    case WAPSEL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WAPSEL_ERR_RANGE: return "out of range";
    case WAPSEL_ERR_DOMAIN: return "domain error";
    case WAPSEL_ERR_PARSE: return "parse error";
    case WAPSEL_ERR_VALIDATION: return "validation error";
    case WAPSEL_ERR_CONFIG: return "config error";
    case WAPSEL_ERR_IO: return "i/o error";
    case WAPSEL_ERR_DIVERGED: return "training diverged";
    case WAPSEL_ERR_MISMATCH: return "artifact mismatch";
    case WAPSEL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* wapsel_last_error(void) { return g_last_error.c_str(); }

const char* wapsel_version(void) { return "1.0.0"; }

void wapsel_string_free(char* s) { std::free(s); }

wapsel_status wapsel_enum_parse(wapsel_enum_kind kind, const char* text, int* code) {
  return guarded([&] {
    require(text, "text");
    require(code, "code");
    using namespace wapsel;
    const std::string_view t(text);
    switch (kind) {
      case WAPSEL_ENUM_PERFORMANCE_MODE: *code = static_cast<int>(parse_enum<PerformanceMode>(t)); return;
      case WAPSEL_ENUM_ACCESS_CATEGORY: *code = static_cast<int>(parse_enum<AccessCategory>(t)); return;
      case WAPSEL_ENUM_APP_TYPE: *code = static_cast<int>(parse_enum<AppType>(t)); return;
      case WAPSEL_ENUM_TIME_OF_DAY: *code = static_cast<int>(parse_enum<TimeOfDay>(t)); return;
      case WAPSEL_ENUM_BATTERY_CONFIG: *code = static_cast<int>(parse_enum<BatteryConfig>(t)); return;
      case WAPSEL_ENUM_LOSS: *code = static_cast<int>(parse_enum<LossKind>(t)); return;
      case WAPSEL_ENUM_REWARD_MODE: *code = static_cast<int>(parse_enum<RewardMode>(t)); return;
    }
    throw std::invalid_argument("unknown enum kind");
  });
}

wapsel_status wapsel_enum_name(wapsel_enum_kind kind, int code, const char** out) {
  return guarded([&] {
    require(out, "name");
    using namespace wapsel;
    std::string_view n;
    switch (kind) {
      case WAPSEL_ENUM_PERFORMANCE_MODE: n = name(enum_at<PerformanceMode>(code, kNumModes)); break;
      case WAPSEL_ENUM_ACCESS_CATEGORY: n = name(enum_at<AccessCategory>(code, kNumCategories)); break;
      case WAPSEL_ENUM_APP_TYPE: n = name(enum_at<AppType>(code, kNumApps)); break;
      case WAPSEL_ENUM_TIME_OF_DAY: n = name(enum_at<TimeOfDay>(code, kNumTimes)); break;
      case WAPSEL_ENUM_BATTERY_CONFIG: n = name(enum_at<BatteryConfig>(code, kNumBatteryConfigs)); break;
      case WAPSEL_ENUM_LOSS: n = name(enum_at<LossKind>(code, 3)); break;
      case WAPSEL_ENUM_REWARD_MODE: n = name(enum_at<RewardMode>(code, 2)); break;
      default: throw std::invalid_argument("unknown enum kind");
    }
    // All names are views of string literals.
    *out = n.data();
  });
}

wapsel_status wapsel_action_from_index(int index, int* mode, int* category) {
  return guarded([&] {
    require(mode, "mode");
    require(category, "category");
    if (index < 0) throw std::out_of_range("action index " + std::to_string(index) + " out of range");
    const auto a = wapsel::action_from_index(static_cast<std::size_t>(index));
    *mode = static_cast<int>(a.mode);
    *category = static_cast<int>(a.category);
  });
}

wapsel_status wapsel_action_index(int mode, int category, int* index) {
  return guarded([&] {
    require(index, "index");
    const wapsel::Action a{enum_at<wapsel::PerformanceMode>(mode, wapsel::kNumModes),
                           enum_at<wapsel::AccessCategory>(category, wapsel::kNumCategories)};
    *index = static_cast<int>(a.index());
  });
}

wapsel_status wapsel_latency_score(int app, double latency_ms, double* score) {
  return guarded([&] {
    require(score, "score");
    *score = wapsel::latency_score(enum_at<wapsel::AppType>(app, wapsel::kNumApps), latency_ms,
                                   wapsel::ToleranceTable::defaults());
  });
}

wapsel_status wapsel_energy_score(double battery_pct, double energy_pct_per_hour, double* score) {
  return guarded([&] {
    require(score, "score");
    *score = wapsel::energy_score(battery_pct, energy_pct_per_hour);
  });
}

wapsel_status wapsel_soft_labels(const double objective[WAPSEL_NUM_ACTIONS], double temperature,
                                 double labels[WAPSEL_NUM_ACTIONS]) {
  return guarded([&] {
    require(objective, "objective");
    require(labels, "labels");
    copy_out(wapsel::soft_labels(to_per_action(objective), temperature), labels);
  });
}

wapsel_status wapsel_rewards(const wapsel_config* config, const wapsel_context* context,
                             const double latency_ms[WAPSEL_NUM_ACTIONS],
                             const double energy_pct_per_hour[WAPSEL_NUM_ACTIONS],
                             double objective[WAPSEL_NUM_ACTIONS],
                             double latency_score[WAPSEL_NUM_ACTIONS],
                             double energy_score[WAPSEL_NUM_ACTIONS]) {
  return guarded([&] {
    require(config, "config");
    require(latency_ms, "latency_ms");
    require(energy_pct_per_hour, "energy_pct_per_hour");
    const auto ctx = to_context(context);
    ctx.validate(config->cfg.dataset.window);
    wapsel::MeasurementVector mv;
    mv.latency_ms = to_per_action(latency_ms);
    mv.energy_pct_per_hour = to_per_action(energy_pct_per_hour);
    mv.validate();
    const auto rv = wapsel::compute_rewards(ctx, mv, config->cfg.reward, config->cfg.tolerance);
    copy_out(rv.objective, objective);
    copy_out(rv.latency_score, latency_score);
    copy_out(rv.energy_score, energy_score);
  });
}

wapsel_status wapsel_config_default(wapsel_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new wapsel_config{wapsel::ExperimentConfig::defaults()};
  });
}

wapsel_status wapsel_config_load(const char* path, wapsel_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new wapsel_config{wapsel::load_config(path)};
  });
}

wapsel_status wapsel_config_override(wapsel_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    wapsel::override_config(config->cfg, key, value);
  });
}

wapsel_status wapsel_config_set_seed(wapsel_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->cfg.set_seed(seed);
  });
}

wapsel_status wapsel_config_hash(const wapsel_config* config, char** hash) {
  return guarded([&] {
    require(config, "config");
    require(hash, "hash");
    *hash = dup(wapsel::config_hash(config->cfg));
  });
}

wapsel_status wapsel_config_to_json(const wapsel_config* config, char** json) {
  return guarded([&] {
    require(config, "config");
    require(json, "json");
    *json = dup(wapsel::config_to_json(config->cfg).dump(2) + "\n");
  });
}

wapsel_status wapsel_config_output_dir(const wapsel_config* config, char** dir) {
  return guarded([&] {
    require(config, "config");
    require(dir, "dir");
    *dir = dup(config->cfg.output_dir);
  });
}

void wapsel_config_free(wapsel_config* config) { delete config; }

wapsel_status wapsel_gen(const wapsel_config* config, const char* out_dir, char** manifest_json) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    const auto manifest = wapsel::run_gen(config->cfg, out_dir);
    if (manifest_json) *manifest_json = dup(manifest.dump(2) + "\n");
  });
}

wapsel_status wapsel_dataset_load(const wapsel_config* config, const char* path, const char* default_name,
                                  wapsel_dataset** out) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    require(out, "out");
    *out = new wapsel_dataset{wapsel::load_split(config->cfg, path, default_name ? default_name : "")};
  });
}

wapsel_status wapsel_dataset_size(const wapsel_dataset* dataset, size_t* size) {
  return guarded([&] {
    require(dataset, "dataset");
    require(size, "size");
    *size = dataset->data.size();
  });
}

wapsel_status wapsel_dataset_slice(const wapsel_dataset* dataset, wapsel_slice slice, wapsel_dataset** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    switch (slice) {
      case WAPSEL_SLICE_ALL: *out = new wapsel_dataset{dataset->data}; return;
      case WAPSEL_SLICE_COOP: *out = new wapsel_dataset{wapsel::cooperative_slice(dataset->data)}; return;
    }
    throw std::invalid_argument("unknown slice");
  });
}

wapsel_status wapsel_dataset_mask_peer(const wapsel_dataset* dataset, wapsel_dataset** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = new wapsel_dataset{wapsel::mask_peer(dataset->data)};
  });
}

void wapsel_dataset_free(wapsel_dataset* dataset) { delete dataset; }

wapsel_train_options wapsel_train_options_default(void) { return wapsel_train_options{-1, 0, 0, -1}; }

wapsel_status wapsel_train(const wapsel_config* config, const wapsel_dataset* train, const wapsel_dataset* test,
                           const wapsel_train_options* options, const wapsel_model* reference,
                           wapsel_model** out, char** report_json) {
  return guarded([&] {
    require(config, "config");
    require(train, "train");
    require(out, "out");
    wapsel::TrainOptions opts;
    if (options) {
      if (options->loss >= 0) opts.loss = enum_at<wapsel::LossKind>(options->loss, 3);
      if (options->layers > 0) opts.layers = static_cast<std::size_t>(options->layers);
      if (options->layers < 0) throw std::invalid_argument("layers must be >= 0");
      opts.no_peer = options->no_peer != 0;
      if (options->reward_mode >= 0) opts.reward = enum_at<wapsel::RewardMode>(options->reward_mode, 2);
    }
    auto outcome = wapsel::run_train(config->cfg, train->data, opts, reference ? &reference->ckpt : nullptr,
                                     test ? &test->data : nullptr);
    if (report_json) *report_json = dup(wapsel::to_json(outcome.report).dump(2) + "\n");
    *out = new wapsel_model{std::move(outcome.checkpoint)};
  });
}

wapsel_status wapsel_model_load(const char* path, wapsel_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new wapsel_model{wapsel::load_checkpoint(path)};
  });
}

wapsel_status wapsel_model_save(const wapsel_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    wapsel::save_checkpoint(path, model->ckpt);
  });
}

wapsel_status wapsel_model_metadata(const wapsel_model* model, char** json) {
  return guarded([&] {
    require(model, "model");
    require(json, "json");
    const auto j = wapsel::metadata_json(model->ckpt);
    *json = dup(j.dump(2) + "\n");
  });
}

void wapsel_model_free(wapsel_model* model) { delete model; }

wapsel_status wapsel_policy_create(const char* name, const wapsel_model* model, wapsel_policy** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new wapsel_policy{wapsel::make_policy(name, model ? &model->ckpt : nullptr)};
  });
}

wapsel_status wapsel_policy_name(const wapsel_policy* policy, char** name) {
  return guarded([&] {
    require(policy, "policy");
    require(name, "name");
    *name = dup(policy->impl->name());
  });
}

wapsel_status wapsel_policy_decide(const wapsel_policy* policy, const wapsel_context* context,
                                   const double truth[WAPSEL_NUM_ACTIONS], int* action_index) {
  return guarded([&] {
    require(policy, "policy");
    require(action_index, "action_index");
    const auto ctx = to_context(context);
    if (ctx.app_history.empty()) throw std::invalid_argument("context.app_history must not be empty");
    if (truth == nullptr && policy->impl->name() == "oracle") {
      throw std::invalid_argument("the oracle policy needs the ground-truth objective");
    }
    const wapsel::PerAction t = truth ? to_per_action(truth) : wapsel::PerAction{};
    *action_index = static_cast<int>(policy->impl->decide(ctx, t).index());
  });
}

void wapsel_policy_free(wapsel_policy* policy) { delete policy; }

wapsel_status wapsel_evaluate(const wapsel_config* config, const wapsel_policy* const* policies, size_t count,
                              const wapsel_dataset* dataset, wapsel_metric metric, const char* slice_label,
                              char** report_json, char** flat_table) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    const auto ps = unwrap(policies, count);
    auto report = wapsel::evaluate_all(ps, dataset->data, metric_config(config->cfg, metric), config->cfg.tolerance,
                                       slice_label ? slice_label : "all");
    report.config_hash = wapsel::config_hash(config->cfg);
    if (report_json) *report_json = dup(wapsel::to_json(report).dump(2) + "\n");
    if (flat_table) *flat_table = dup(wapsel::flat_table(std::span<const wapsel::EvalReport>(&report, 1)));
  });
}

wapsel_status wapsel_replay(const wapsel_config* config, const wapsel_policy* const* policies, size_t count,
                            const wapsel_dataset* dataset, int time, int battery_config, size_t max_steps,
                            char** transcript) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(transcript, "transcript");
    const auto ps = unwrap(policies, count);
    const wapsel::Scenario scenario{enum_at<wapsel::TimeOfDay>(time, wapsel::kNumTimes),
                                    enum_at<wapsel::BatteryConfig>(battery_config, wapsel::kNumBatteryConfigs)};
    *transcript = dup(wapsel::replay_snapshot(dataset->data, ps, scenario, max_steps ? max_steps : config->cfg.replay_steps, config->cfg.reward,
                                              config->cfg.tolerance));
  });
}

wapsel_status wapsel_compare(const wapsel_config* config, const char* out_dir, char** table) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    const auto text = wapsel::run_compare(config->cfg, out_dir);
    if (table) *table = dup(text);
  });
}

}  // extern "C"
