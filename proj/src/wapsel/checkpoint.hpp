#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "wapsel/head.hpp"
#include "wapsel/reward.hpp"
#include "wapsel/trainer.hpp"

namespace wapsel {

inline constexpr std::string_view kCheckpointMagic = "WAPSHEAD";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct ModelMetadata {
  LossKind loss = LossKind::kl;
  std::uint64_t seed = 0;
  std::string config_hash;
  bool no_peer = false;
  RewardMode reward_mode = RewardMode::contextAware;
  std::optional<LossKind> dpo_base;  // SFT loss of the DPO reference
  std::size_t epochs = 0;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

struct Checkpoint {
  HeadModel model;
  ModelMetadata meta;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Little-endian layout (see docs/checkpoint_format.md):
//   magic "WAPSHEAD" | u32 version | u32 layer count |
//   per layer: u32 in, u32 out |
//   per layer: f64 weights[out*in] row-major, f64 bias[out] |
//   u32 metadata length | metadata JSON (UTF-8, keys sorted)
// Metadata block as stored in the file (keys sorted).
nlohmann::json metadata_json(const Checkpoint& ckpt);

std::string encode_checkpoint(const Checkpoint& ckpt);
// Throws ParseError on any structural problem.
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wapsel
