#include "wapsel/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wapsel/errors.hpp"
#include "wapsel/io.hpp"

namespace wapsel {
namespace {

using nlohmann::json;

const json& need(const json& root, const std::string& path) {
  const json* cur = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!cur->is_object() || !cur->contains(key)) {
      throw ConfigError("missing config key '" + path + "'");
    }
    cur = &(*cur)[key];
    if (dot == std::string::npos) return *cur;
    start = dot + 1;
  }
}

template <typename T>
T get(const json& root, const std::string& path) {
  try {
    return need(root, path).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + path + "' has the wrong type");
  }
}

template <typename E>
E get_enum(const json& root, const std::string& path) {
  try {
    return parse_enum<E>(get<std::string>(root, path));
  } catch (const ParseError& e) {
    throw ConfigError("config key '" + path + "': " + e.what());
  }
}

PerAction get_per_action(const json& root, const std::string& path) {
  auto v = get<std::vector<double>>(root, path);
  if (v.size() != kNumActions) throw ConfigError("config key '" + path + "' needs 8 values");
  PerAction out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct HeadSpec {
  std::string_view row;
  LossKind loss;
  bool no_peer;
  std::string_view reference_row;  // empty unless DPO
};

constexpr std::array<HeadSpec, 4> kHeadSpecs{{
    {"head-ce", LossKind::ce, false, ""},
    {"head-kl", LossKind::kl, false, ""},
    {"head-kl+dpo", LossKind::dpo, false, "head-kl"},
    {"head-kl-no-peer", LossKind::kl, true, ""},
}};

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.set_seed(cfg.seed);
  return cfg;
}

void ExperimentConfig::set_seed(std::uint64_t value) {
  seed = value;
  dataset.seed = value;
  train.seed = value;
}

void ExperimentConfig::validate() const {
  try {
    dataset.validate();
    link.validate();
    reward.validate();
    tolerance.validate();
    train.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;

  auto& d = j["dataset"];
  d["logs_per_session"] = cfg.dataset.logs_per_session;
  d["sample_interval_s"] = cfg.dataset.sample_interval_s;
  d["window"] = cfg.dataset.window;
  d["split_fraction"] = cfg.dataset.split_fraction;
  for (std::size_t c = 0; c < kNumBatteryClasses; ++c) {
    const auto& r = cfg.dataset.battery_ranges[c];
    d["battery_ranges"][std::string(name(static_cast<BatteryClass>(c)))] = {r.lo, r.hi};
  }

  auto& l = j["link"];
  l["base_latency_ms"] = cfg.link.base_latency_ms;
  l["base_energy_pct_per_hour"] = cfg.link.base_energy_pct_per_hour;
  for (std::size_t t = 0; t < kNumTimes; ++t) {
    l["time_latency_multiplier"][std::string(name(static_cast<TimeOfDay>(t)))] =
        cfg.link.time_latency_multiplier[t];
  }
  l["latency_noise_sigma"] = cfg.link.latency_noise_sigma;
  l["energy_noise_sigma"] = cfg.link.energy_noise_sigma;

  auto& r = j["reward"];
  r["w_l"] = cfg.reward.w_latency;
  r["w_p"] = cfg.reward.w_power;
  r["reward_mode"] = name(cfg.reward.mode);
  r["soft_temp"] = cfg.reward.soft_label_temperature;
  for (std::size_t a = 0; a < kNumApps; ++a) {
    r["tolerance_ms"][std::string(name(static_cast<AppType>(a)))] = cfg.tolerance.tolerance_ms[a];
  }

  auto& t = j["train"];
  t["loss"] = name(cfg.train.loss);
  t["epochs"] = cfg.train.epochs;
  t["effective_batch"] = cfg.train.batch_size;
  t["learning_rate"] = cfg.train.learning_rate;
  t["weight_decay"] = cfg.train.weight_decay;
  t["dpo_beta"] = cfg.train.dpo_beta;
  t["layers"] = cfg.train.layers;
  t["hidden"] = cfg.train.hidden;

  j["eval"]["replay_steps"] = cfg.replay_steps;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.output_dir = get<std::string>(j, "output_dir");

  cfg.dataset.logs_per_session = get<std::size_t>(j, "dataset.logs_per_session");
  cfg.dataset.sample_interval_s = get<double>(j, "dataset.sample_interval_s");
  cfg.dataset.window = get<std::size_t>(j, "dataset.window");
  cfg.dataset.split_fraction = get<double>(j, "dataset.split_fraction");
  for (std::size_t c = 0; c < kNumBatteryClasses; ++c) {
    const std::string key = "dataset.battery_ranges." + std::string(name(static_cast<BatteryClass>(c)));
    auto range = get<std::vector<double>>(j, key);
    if (range.size() != 2) throw ConfigError("config key '" + key + "' needs [lo, hi]");
    cfg.dataset.battery_ranges[c] = {range[0], range[1]};
  }

  cfg.link.base_latency_ms = get_per_action(j, "link.base_latency_ms");
  cfg.link.base_energy_pct_per_hour = get_per_action(j, "link.base_energy_pct_per_hour");
  for (std::size_t t = 0; t < kNumTimes; ++t) {
    cfg.link.time_latency_multiplier[t] =
        get<double>(j, "link.time_latency_multiplier." + std::string(name(static_cast<TimeOfDay>(t))));
  }
  cfg.link.latency_noise_sigma = get<double>(j, "link.latency_noise_sigma");
  cfg.link.energy_noise_sigma = get<double>(j, "link.energy_noise_sigma");

  cfg.reward.w_latency = get<double>(j, "reward.w_l");
  cfg.reward.w_power = get<double>(j, "reward.w_p");
  cfg.reward.mode = get_enum<RewardMode>(j, "reward.reward_mode");
  cfg.reward.soft_label_temperature = get<double>(j, "reward.soft_temp");
  for (std::size_t a = 0; a < kNumApps; ++a) {
    cfg.tolerance.tolerance_ms[a] =
        get<double>(j, "reward.tolerance_ms." + std::string(name(static_cast<AppType>(a))));
  }

  cfg.train.loss = get_enum<LossKind>(j, "train.loss");
  cfg.train.epochs = get<std::size_t>(j, "train.epochs");
  cfg.train.batch_size = get<std::size_t>(j, "train.effective_batch");
  cfg.train.learning_rate = get<double>(j, "train.learning_rate");
  cfg.train.weight_decay = get<double>(j, "train.weight_decay");
  cfg.train.dpo_beta = get<double>(j, "train.dpo_beta");
  cfg.train.layers = get<std::size_t>(j, "train.layers");
  cfg.train.hidden = get<std::size_t>(j, "train.hidden");
  cfg.train.soft_temperature = cfg.reward.soft_label_temperature;

  cfg.replay_steps = get<std::size_t>(j, "eval.replay_steps");
  cfg.set_seed(get<std::uint64_t>(j, "seed"));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  io::write_file_atomic(path, config_to_json(cfg).dump(2) + "\n");
}

void override_config(ExperimentConfig& cfg, std::string_view dotted_key, std::string_view json_value) {
  json j = config_to_json(cfg);
  const std::string key(dotted_key);
  need(j, key);  // only existing keys may be overridden
  json value;
  try {
    value = json::parse(json_value);
  } catch (const json::exception&) {
    value = std::string(json_value);  // bare strings such as kl or naive
  }
  std::string pointer = "/" + key;
  for (auto& ch : pointer) ch = (ch == '.') ? '/' : ch;
  j[json::json_pointer(pointer)] = value;
  cfg = config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("output_dir");
  return io::sha256_hex(j.dump()).substr(0, 16);
}

DataBundle generate_bundle(const ExperimentConfig& cfg) {
  cfg.validate();
  auto split_rng = session_rng(cfg.seed, static_cast<std::uint64_t>(Stream::split), 0);
  Dataset in = generate_dataset(AppUsageProfile::in_distribution(), cfg.link, cfg.dataset,
                                cfg.reward, cfg.tolerance, Stream::inDistribution);
  Dataset ood = generate_dataset(AppUsageProfile::out_of_distribution(), cfg.link, cfg.dataset,
                                 cfg.reward, cfg.tolerance, Stream::outOfDistribution);
  auto [train_set, test_set] = split(in, cfg.dataset.split_fraction, split_rng);
  auto ood_split = split(ood, cfg.dataset.split_fraction, split_rng);
  return DataBundle{std::move(train_set), std::move(test_set), std::move(ood_split.second)};
}

nlohmann::ordered_json run_gen(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const DataBundle bundle = generate_bundle(cfg);
  std::filesystem::create_directories(out_dir);
  nlohmann::ordered_json manifest;
  manifest["config_hash"] = config_hash(cfg);
  manifest["seed"] = cfg.seed;
  manifest["in_distribution_samples"] = bundle.train.size() + bundle.test.size();
  manifest["scenarios"] = kNumScenarios;
  manifest["logs_per_session"] = cfg.dataset.logs_per_session;
  auto files = nlohmann::ordered_json::object();
  auto write = [&](const char* file, const Dataset& ds) {
    const std::string body = serialize_dataset(ds);
    io::write_file_atomic(out_dir / file, body);
    files[file] = {{"samples", ds.size()}, {"sha256", io::sha256_hex(body)}};
  };
  write("train.jsonl", bundle.train);
  write("test.jsonl", bundle.test);
  write("ood_test.jsonl", bundle.ood_test);
  manifest["files"] = std::move(files);
  io::write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

Dataset load_split(const ExperimentConfig& cfg, const std::filesystem::path& path,
                   std::string_view default_name) {
  const auto file = std::filesystem::is_directory(path) ? path / default_name : path;
  return load_dataset(file, cfg.dataset.window, cfg.reward, cfg.tolerance);
}

TrainOutcome run_train(const ExperimentConfig& cfg, const Dataset& train_set,
                       const TrainOptions& options, const Checkpoint* reference,
                       const Dataset* test_set) {
  TrainConfig tc = cfg.train;
  if (options.loss) tc.loss = *options.loss;
  if (options.layers) tc.layers = *options.layers;
  if (tc.loss == LossKind::dpo && reference == nullptr) {
    throw std::invalid_argument("--loss dpo requires a reference checkpoint (--ref)");
  }
  RewardConfig labels = cfg.reward;
  if (options.reward) labels.mode = *options.reward;

  Dataset data = relabel(train_set, labels, cfg.tolerance);
  if (options.no_peer) data = mask_peer(std::move(data));

  HeadModel start = tc.loss == LossKind::dpo ? reference->model
                                              : HeadModel::initialized(tc.layers, tc.hidden, tc.seed);
  auto result = train(data, std::move(start), tc, reference ? &reference->model : nullptr, test_set);

  TrainOutcome out;
  out.checkpoint.model = std::move(result.model);
  out.checkpoint.meta.loss = tc.loss;
  out.checkpoint.meta.seed = tc.seed;
  out.checkpoint.meta.config_hash = config_hash(cfg);
  out.checkpoint.meta.no_peer = options.no_peer;
  out.checkpoint.meta.reward_mode = labels.mode;
  out.checkpoint.meta.epochs = tc.epochs;
  if (tc.loss == LossKind::dpo) out.checkpoint.meta.dpo_base = reference->meta.loss;
  out.report = std::move(result.report);
  return out;
}

nlohmann::ordered_json to_json(const TrainReport& report) {
  nlohmann::ordered_json j;
  j["epoch_mean_loss"] = report.epoch_mean_loss;
  j["steps"] = report.steps;
  j["dpo_skipped"] = report.dpo_skipped;
  j["train_accuracy"] = report.train_accuracy;
  j["test_accuracy"] = report.test_accuracy ? nlohmann::ordered_json(*report.test_accuracy)
                                            : nlohmann::ordered_json(nullptr);
  return j;
}

std::unique_ptr<Policy> make_policy(std::string_view policy, const Checkpoint* checkpoint) {
  if (auto p = make_baseline_policy(policy)) return p;
  if (policy == "head") {
    if (checkpoint == nullptr) throw std::invalid_argument("policy 'head' needs a checkpoint (--model)");
    std::string label = "head-" + std::string(name(checkpoint->meta.loss));
    if (checkpoint->meta.no_peer) label += "-no-peer";
    return std::make_unique<HeadPolicy>(checkpoint->model, label, checkpoint->meta.no_peer);
  }
  std::string valid;
  for (auto n : kPolicyNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw std::invalid_argument("unknown policy '" + std::string(policy) + "' (valid: " + valid + ")");
}

std::string run_compare(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const std::string hash = config_hash(cfg);
  const auto manifest_path = out_dir / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    const auto manifest = json::parse(io::read_file(manifest_path));
    const auto stamped = manifest.value("config_hash", std::string());
    if (stamped != hash) {
      throw ArtifactMismatchError("artifacts in '" + out_dir.string() + "' have config hash " + stamped +
                                  ", active config has " + hash);
    }
  } else {
    run_gen(cfg, out_dir);
  }
  const Dataset train_set = load_split(cfg, out_dir, "train.jsonl");
  const Dataset test_set = load_split(cfg, out_dir, "test.jsonl");
  const Dataset ood_set = load_split(cfg, out_dir, "ood_test.jsonl");

  std::vector<Checkpoint> heads;
  for (const auto& spec : kHeadSpecs) {
    const auto path = out_dir / (std::string(spec.row) + ".ckpt");
    if (std::filesystem::exists(path)) {
      Checkpoint ckpt = load_checkpoint(path);
      if (ckpt.meta.config_hash != hash) {
        throw ArtifactMismatchError("checkpoint '" + path.string() + "' has config hash " +
                                    ckpt.meta.config_hash + ", active config has " + hash);
      }
      heads.push_back(std::move(ckpt));
      continue;
    }
    TrainOptions opts;
    opts.loss = spec.loss;
    opts.no_peer = spec.no_peer;
    const Checkpoint* reference = nullptr;
    if (!spec.reference_row.empty()) {
      for (std::size_t k = 0; k < heads.size(); ++k) {
        if (kHeadSpecs[k].row == spec.reference_row) reference = &heads[k];
      }
    }
    auto outcome = run_train(cfg, train_set, opts, reference, &test_set);
    save_checkpoint(path, outcome.checkpoint);
    auto report = to_json(outcome.report);
    report["config_hash"] = hash;
    io::write_file_atomic(out_dir / (std::string(spec.row) + ".report.json"), report.dump(2) + "\n");
    heads.push_back(std::move(outcome.checkpoint));
  }

  std::vector<std::unique_ptr<Policy>> owned;
  for (std::size_t r = 0; r < 4; ++r) owned.push_back(make_baseline_policy(kCompareRows[r]));
  for (std::size_t k = 0; k < heads.size(); ++k) {
    owned.push_back(std::make_unique<HeadPolicy>(heads[k].model, std::string(kHeadSpecs[k].row),
                                                 heads[k].meta.no_peer));
  }
  std::vector<const Policy*> policies;
  for (const auto& p : owned) policies.push_back(p.get());

  const RewardConfig metric = cfg.reward;
  std::vector<EvalReport> reports;
  reports.push_back(evaluate_all(policies, test_set, metric, cfg.tolerance, "aggregate"));
  reports.push_back(evaluate_all(policies, cooperative_slice(test_set), metric, cfg.tolerance, "coop"));
  reports.push_back(evaluate_all(policies, ood_set, metric, cfg.tolerance, "ood"));
  for (auto& r : reports) r.config_hash = hash;

  std::string table = "# config_hash=" + hash + "\npolicy";
  for (const auto& r : reports) {
    table += "\tobjective_" + r.slice + "\tlatency_" + r.slice + "\tenergy_" + r.slice;
  }
  table += "\n";
  for (std::size_t row = 0; row < kCompareRows.size(); ++row) {
    table += std::string(kCompareRows[row]);
    for (const auto& r : reports) {
      const auto& m = r.policies[row].mean;
      table += "\t" + fixed(m.objective, 4) + "\t" + fixed(m.latency_score, 4) + "\t" + fixed(m.energy_score, 4);
    }
    table += "\n";
  }
  io::write_file_atomic(out_dir / "compare.tsv", table);
  io::write_file_atomic(out_dir / "compare_flat.tsv", flat_table(reports));
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (const auto& r : reports) all.push_back(to_json(r));
  io::write_file_atomic(out_dir / "compare.json", all.dump(2) + "\n");
  return table;
}

}  // namespace wapsel
