#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wapsel/datagen.hpp"
#include "wapsel/head.hpp"
#include "wapsel/policy.hpp"

namespace wapsel {

enum class LossKind : std::uint8_t { ce = 0, kl = 1, dpo = 2 };

std::string_view name(LossKind k);
template <>
LossKind parse_enum<LossKind>(std::string_view text);

struct TrainConfig {
  LossKind loss = LossKind::kl;
  std::size_t epochs = 5;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double dpo_beta = 0.1;
  double soft_temperature = 1.0;
  std::uint64_t seed = 42;
  std::size_t layers = kDefaultHeadLayers;
  std::size_t hidden = kDefaultHiddenWidth;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

struct TrainReport {
  std::vector<double> epoch_mean_loss;
  std::size_t steps = 0;
  std::size_t dpo_skipped = 0;  // samples with argmax == argmin objective
  double train_accuracy = 0.0;  // agreement with the oracle action
  std::optional<double> test_accuracy;
};

struct TrainResult {
  HeadModel model;
  TrainReport report;
};

// Mini-batch AdamW (decoupled weight decay) over cfg.epochs epochs with a
// seeded per-epoch shuffle. CE targets the argmax of each sample's objective,
// KL the soft labels at cfg.soft_temperature, and DPO pairs argmax against
// argmin relative to `reference`, which is required for DPO.
// Throws DivergenceError if the loss becomes non-finite.
TrainResult train(const Dataset& train_set, HeadModel model, const TrainConfig& cfg,
                  const HeadModel* reference = nullptr, const Dataset* test_set = nullptr);

// One forward pass; lowest index on tied logits.
Action head_decide(const HeadModel& model, const Context& context);

double accuracy_vs_oracle(const HeadModel& model, const Dataset& dataset);

class HeadPolicy final : public Policy {
 public:
  HeadPolicy(HeadModel model, std::string name, bool mask_peer = false)
      : model_(std::move(model)), name_(std::move(name)), mask_peer_(mask_peer) {}

  std::string name() const override { return name_; }
  Action decide(const Context& context, const PerAction&) const override;
  const HeadModel& model() const { return model_; }

 private:
  HeadModel model_;
  std::string name_;
  bool mask_peer_;
};

}  // namespace wapsel
