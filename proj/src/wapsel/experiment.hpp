#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "wapsel/checkpoint.hpp"
#include "wapsel/datagen.hpp"
#include "wapsel/eval.hpp"
#include "wapsel/trainer.hpp"

namespace wapsel {

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string output_dir = "runs/default";
  DatasetConfig dataset;
  LinkModelConfig link = LinkModelConfig::defaults();
  RewardConfig reward;
  ToleranceTable tolerance = ToleranceTable::defaults();
  TrainConfig train;
  std::size_t replay_steps = 8;

  static ExperimentConfig defaults();

  // Propagates the top-level seed into the dataset and training sections.
  void set_seed(std::uint64_t value);
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
// Every key is required; a missing one raises ConfigError naming its path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

// Overrides one key given as a dotted path ("train.epochs") and a JSON value.
void override_config(ExperimentConfig& cfg, std::string_view dotted_key, std::string_view json_value);

// First 16 hex digits of the SHA-256 of the canonical config, output_dir excluded.
std::string config_hash(const ExperimentConfig& cfg);

// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "WAPSEL_CONFIG";

struct DataBundle {
  Dataset train;
  Dataset test;
  Dataset ood_test;
};

// In-distribution grid split into train/test plus the test half of an OOD grid.
DataBundle generate_bundle(const ExperimentConfig& cfg);

// Writes train.jsonl, test.jsonl, ood_test.jsonl and manifest.json into out_dir
// and returns the manifest.
nlohmann::ordered_json run_gen(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Loads a dataset file, or <dir>/<name> when `path` is a directory.
Dataset load_split(const ExperimentConfig& cfg, const std::filesystem::path& path,
                   std::string_view default_name);

struct TrainOptions {
  std::optional<LossKind> loss;
  std::optional<std::size_t> layers;
  bool no_peer = false;
  std::optional<RewardMode> reward;
};

struct TrainOutcome {
  Checkpoint checkpoint;
  TrainReport report;
};

// Throws std::invalid_argument when DPO is requested without a reference.
TrainOutcome run_train(const ExperimentConfig& cfg, const Dataset& train_set,
                       const TrainOptions& options, const Checkpoint* reference,
                       const Dataset* test_set = nullptr);

nlohmann::ordered_json to_json(const TrainReport& report);

// Builds a policy by CLI name; "head" needs a checkpoint.
std::unique_ptr<Policy> make_policy(std::string_view name, const Checkpoint* checkpoint);

// Rows of the consolidated comparison.
inline constexpr std::array<std::string_view, 8> kCompareRows{
    "oracle", "rule", "fix-rt-iv", "fix-bulk-bg", "head-ce", "head-kl", "head-kl+dpo", "head-kl-no-peer"};

// gen -> train -> eval over out_dir, reusing artifacts already present. Refuses
// artifacts stamped with a different config hash. Returns the table text,
// also written to out_dir/compare.tsv.
std::string run_compare(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace wapsel
