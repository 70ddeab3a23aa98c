// Command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wapsel/wapsel.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Carries a library status out of nested helpers.
struct Failure {
  wapsel_status status;
  std::string message;
};

void check(wapsel_status s) {
  if (s != WAPSEL_OK) throw Failure{s, wapsel_last_error()};
}

void usage(std::string message) { throw Failure{WAPSEL_ERR_INVALID_ARGUMENT, std::move(message)}; }

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { wapsel_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Free(p); }
};

using Config = Handle<wapsel_config, wapsel_config_free>;
using DatasetH = Handle<wapsel_dataset, wapsel_dataset_free>;
using Model = Handle<wapsel_model, wapsel_model_free>;
using PolicyH = Handle<wapsel_policy, wapsel_policy_free>;

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{WAPSEL_ERR_IO, "cannot open '" + tmp.string() + "' for writing"};
    out << text;
    if (!out) throw Failure{WAPSEL_ERR_IO, "write failed for '" + tmp.string() + "'"};
  }
  fs::rename(tmp, path);
}

int parse_enum(wapsel_enum_kind kind, const std::string& text) {
  int code = 0;
  if (wapsel_enum_parse(kind, text.c_str(), &code) != WAPSEL_OK) usage(wapsel_last_error());
  return code;
}

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string output_dir;
};

Config load_config(const GlobalOptions& g) {
  Config cfg;
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("WAPSEL_CONFIG"); env != nullptr && *env != '\0') path = env;
  }
  if (path.empty()) {
    check(wapsel_config_default(&cfg.p));
  } else {
    check(wapsel_config_load(path.c_str(), &cfg.p));
  }
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) usage("--set expects key=value, got '" + kv + "'");
    check(wapsel_config_override(cfg.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  if (!g.output_dir.empty()) {
    const std::string quoted = "\"" + g.output_dir + "\"";
    check(wapsel_config_override(cfg.p, "output_dir", quoted.c_str()));
  }
  if (g.seed) check(wapsel_config_set_seed(cfg.p, *g.seed));
  return cfg;
}

std::string output_dir(const Config& cfg) {
  OwnedString s;
  check(wapsel_config_output_dir(cfg.p, &s.p));
  return s.str();
}

std::string config_hash(const Config& cfg) {
  OwnedString s;
  check(wapsel_config_hash(cfg.p, &s.p));
  return s.str();
}

DatasetH load_data(const Config& cfg, const std::string& path, const char* default_name) {
  DatasetH d;
  check(wapsel_dataset_load(cfg.p, path.c_str(), default_name, &d.p));
  return d;
}

Model load_model(const std::string& path) {
  Model m;
  check(wapsel_model_load(path.c_str(), &m.p));
  return m;
}

// ---- gen -------------------------------------------------------------------

struct GenOptions {
  std::string out;
};

int cmd_gen(const GlobalOptions& g, const GenOptions& o) {
  const Config cfg = load_config(g);
  const std::string dir = o.out.empty() ? output_dir(cfg) : o.out;
  OwnedString manifest;
  check(wapsel_gen(cfg.p, dir.c_str(), &manifest.p));
  std::cout << manifest.str();
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainCliOptions {
  std::string data;
  std::string test;
  std::string loss = "kl";
  int layers = 3;
  bool no_peer = false;
  std::string reward = "context";
  std::string ref;
  std::string out;
};

int cmd_train(const GlobalOptions& g, const TrainCliOptions& o) {
  const int loss = parse_enum(WAPSEL_ENUM_LOSS, o.loss);
  const int reward = parse_enum(WAPSEL_ENUM_REWARD_MODE, o.reward);
  if (o.loss == "dpo" && o.ref.empty()) usage("--loss dpo requires a reference checkpoint (--ref)");

  const Config cfg = load_config(g);
  const std::string dir = output_dir(cfg);
  const DatasetH train = load_data(cfg, o.data.empty() ? dir : o.data, "train.jsonl");
  std::optional<DatasetH> test;
  if (!o.test.empty()) test.emplace(load_data(cfg, o.test, "test.jsonl"));
  std::optional<Model> ref;
  if (!o.ref.empty()) ref.emplace(load_model(o.ref));

  wapsel_train_options opts = wapsel_train_options_default();
  opts.loss = loss;
  opts.layers = o.layers;
  opts.no_peer = o.no_peer ? 1 : 0;
  opts.reward_mode = reward;

  Model model;
  OwnedString report;
  check(wapsel_train(cfg.p, train.p, test ? test->p : nullptr, &opts, ref ? ref->p : nullptr, &model.p,
                     &report.p));

  std::string stem = "head-" + o.loss;
  if (o.no_peer) stem += "-no-peer";
  const fs::path ckpt = o.out.empty() ? fs::path(dir) / (stem + ".ckpt") : fs::path(o.out);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  check(wapsel_model_save(model.p, ckpt.string().c_str()));

  fs::path report_path = ckpt;
  report_path.replace_extension(".report.json");
  std::string text = report.str();
  // Stamp the report with the config hash alongside the training metrics.
  const auto brace = text.find('{');
  if (brace != std::string::npos) {
    text.insert(brace + 1, "\n  \"config_hash\": \"" + config_hash(cfg) + "\",");
  }
  write_atomic(report_path, text);
  std::cout << "checkpoint: " << ckpt.string() << "\nreport: " << report_path.string() << "\n" << text;
  return 0;
}

// ---- eval / replay ---------------------------------------------------------

struct PolicySet {
  std::vector<PolicyH> owned;
  std::vector<const wapsel_policy*> raw;
};

PolicySet make_policies(const std::vector<std::string>& names, const std::string& model_path) {
  PolicySet set;
  std::optional<Model> model;
  if (!model_path.empty()) model.emplace(load_model(model_path));
  for (const auto& n : names) {
    PolicyH p;
    const wapsel_status s = wapsel_policy_create(n.c_str(), model ? model->p : nullptr, &p.p);
    if (s == WAPSEL_ERR_INVALID_ARGUMENT) usage(wapsel_last_error());
    check(s);
    set.raw.push_back(p.p);
    set.owned.push_back(std::move(p));
  }
  return set;
}

struct EvalCliOptions {
  std::string data;
  std::vector<std::string> policies;
  std::string model;
  std::string scenario = "all";
  bool ood = false;
  std::string single;
  std::string out;
};

int cmd_eval(const GlobalOptions& g, const EvalCliOptions& o) {
  wapsel_metric metric = WAPSEL_METRIC_CONFIG;
  if (o.single == "latency") {
    metric = WAPSEL_METRIC_LATENCY_ONLY;
  } else if (o.single == "energy") {
    metric = WAPSEL_METRIC_ENERGY_ONLY;
  } else if (!o.single.empty()) {
    usage("--single must be latency or energy");
  }
  const Config cfg = load_config(g);
  const PolicySet policies = make_policies(o.policies, o.model);
  const std::string dir = output_dir(cfg);
  const DatasetH base = load_data(cfg, o.data.empty() ? dir : o.data, o.ood ? "ood_test.jsonl" : "test.jsonl");
  DatasetH data;
  check(wapsel_dataset_slice(base.p, o.scenario == "coop" ? WAPSEL_SLICE_COOP : WAPSEL_SLICE_ALL, &data.p));

  std::string slice = o.ood ? "ood" : "test";
  if (o.scenario == "coop") slice += "-coop";
  if (!o.single.empty()) slice += "-" + o.single + "-only";

  OwnedString json, table;
  check(wapsel_evaluate(cfg.p, policies.raw.data(), policies.raw.size(), data.p, metric, slice.c_str(), &json.p,
                        &table.p));
  const fs::path out_dir = o.out.empty() ? fs::path(dir) / "eval" : fs::path(o.out);
  write_atomic(out_dir / ("eval_" + slice + ".json"), json.str());
  write_atomic(out_dir / ("eval_" + slice + ".tsv"), table.str());
  std::cout << table.str();
  return 0;
}

struct ReplayCliOptions {
  std::string data;
  std::vector<std::string> policies{"oracle", "rule", "fix-rt-iv", "fix-bulk-bg"};
  std::string model;
  std::string time = "morning";
  std::string battery = "pubHighSubLow";
  std::optional<std::size_t> steps;
  bool ood = false;
};

int cmd_replay(const GlobalOptions& g, ReplayCliOptions o) {
  const int time = parse_enum(WAPSEL_ENUM_TIME_OF_DAY, o.time);
  const int battery = parse_enum(WAPSEL_ENUM_BATTERY_CONFIG, o.battery);
  const Config cfg = load_config(g);
  if (!o.model.empty() && std::find(o.policies.begin(), o.policies.end(), "head") == o.policies.end()) {
    o.policies.push_back("head");
  }
  const PolicySet policies = make_policies(o.policies, o.model);
  const DatasetH data =
      load_data(cfg, o.data.empty() ? output_dir(cfg) : o.data, o.ood ? "ood_test.jsonl" : "test.jsonl");
  const std::size_t steps = o.steps.value_or(0);
  OwnedString transcript;
  check(wapsel_replay(cfg.p, policies.raw.data(), policies.raw.size(), data.p, time, battery, steps,
                      &transcript.p));
  std::cout << transcript.str();
  return 0;
}

// ---- compare ---------------------------------------------------------------

struct CompareOptions {
  std::string out;
};

int cmd_compare(const GlobalOptions& g, const CompareOptions& o) {
  const Config cfg = load_config(g);
  const std::string dir = o.out.empty() ? output_dir(cfg) : o.out;
  OwnedString table;
  check(wapsel_compare(cfg.p, dir.c_str(), &table.p));
  std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-layer Wi-Fi Aware parameter selection: data generation, training and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wapsel_version()));

  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "Config file (default: $WAPSEL_CONFIG, else built-in defaults)");
  app.add_option("--seed", g.seed, "Override the seed everywhere");
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set train.epochs=3")->take_all();
  app.add_option("--output-dir", g.output_dir, "Override output_dir");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate train/test/OOD datasets and a manifest");
  gen_cmd->add_option("-o,--out", gen.out, "Output directory (default: output_dir)");

  TrainCliOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a decision head");
  train_cmd->add_option("-d,--data", tr.data, "Training file or directory holding train.jsonl");
  train_cmd->add_option("--test", tr.test, "Held-out file or directory for test accuracy");
  train_cmd->add_option("--loss", tr.loss, "ce | kl | dpo")->check(CLI::IsMember({"ce", "kl", "dpo"}));
  train_cmd->add_option("--layers", tr.layers, "Head depth")->check(CLI::Range(1, 3));
  train_cmd->add_flag("--no-peer", tr.no_peer, "Hide subscriber context during training");
  train_cmd->add_option("--reward", tr.reward, "context | naive")->check(CLI::IsMember({"context", "naive"}));
  train_cmd->add_option("--ref", tr.ref, "Reference checkpoint (required for dpo)");
  train_cmd->add_option("-o,--out", tr.out, "Checkpoint path (default: <output_dir>/head-<loss>.ckpt)");

  EvalCliOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate policies on a test slice");
  eval_cmd->add_option("-d,--data", ev.data, "Dataset file or directory (default: output_dir)");
  eval_cmd->add_option("-p,--policy", ev.policies, "oracle | rule | fix-rt-iv | fix-bulk-bg | head")
      ->required()
      ->delimiter(',');
  eval_cmd->add_option("-m,--model", ev.model, "Checkpoint for the head policy");
  eval_cmd->add_option("--scenario", ev.scenario, "all | coop")->check(CLI::IsMember({"all", "coop"}));
  eval_cmd->add_flag("--ood", ev.ood, "Use the out-of-distribution test file");
  eval_cmd->add_option("--single", ev.single, "latency | energy")->check(CLI::IsMember({"latency", "energy"}));
  eval_cmd->add_option("-o,--out", ev.out, "Report directory (default: <output_dir>/eval)");

  CompareOptions cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Run gen, train and eval end to end and print the table");
  compare_cmd->add_option("-o,--out", cmp.out, "Artifact directory (default: output_dir)");

  ReplayCliOptions rp;
  auto* replay_cmd = app.add_subcommand("replay", "Print per-step decisions for one scenario");
  replay_cmd->add_option("-d,--data", rp.data, "Dataset file or directory (default: output_dir)");
  replay_cmd->add_option("-p,--policy", rp.policies, "Policies to show")->delimiter(',');
  replay_cmd->add_option("-m,--model", rp.model, "Checkpoint; adds the head policy");
  replay_cmd->add_option("--time", rp.time, "morning | afternoon | evening | night");
  replay_cmd->add_option("--battery", rp.battery, "bothHigh | bothMedium | bothLow | pubHighSubLow");
  replay_cmd->add_option("--steps", rp.steps, "Steps to print (default: eval.replay_steps)");
  replay_cmd->add_flag("--ood", rp.ood, "Use the out-of-distribution test file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(g, gen);
    if (*train_cmd) return cmd_train(g, tr);
    if (*eval_cmd) return cmd_eval(g, ev);
    if (*compare_cmd) return cmd_compare(g, cmp);
    if (*replay_cmd) return cmd_replay(g, rp);
  } catch (const Failure& f) {
    std::cerr << "wapsel: " << wapsel_status_name(f.status) << ": " << f.message << "\n";
    return f.status == WAPSEL_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "wapsel: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
