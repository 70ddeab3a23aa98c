#include "wapsel/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wapsel/errors.hpp"
#include "wapsel/losses.hpp"

namespace wapsel {
namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

class AdamW {
 public:
  AdamW(std::size_t n, const TrainConfig& cfg) : m_(n, 0.0), v_(n, 0.0), cfg_(cfg) {}

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double b1 = cfg_.adam_beta1;
    const double b2 = cfg_.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = cfg_.learning_rate;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
      v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
      const double mhat = m_[i] / c1;
      const double vhat = v_[i] / c2;
      params[i] -= lr * (mhat / (std::sqrt(vhat) + cfg_.adam_epsilon) + cfg_.weight_decay * params[i]);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  const TrainConfig& cfg_;
  std::uint64_t t_ = 0;
};

}  // namespace

std::string_view name(LossKind k) {
  switch (k) {
    case LossKind::ce: return "ce";
    case LossKind::kl: return "kl";
    case LossKind::dpo: return "dpo";
  }
  return "?";
}

template <>
LossKind parse_enum<LossKind>(std::string_view text) {
  if (text == "ce") return LossKind::ce;
  if (text == "kl") return LossKind::kl;
  if (text == "dpo") return LossKind::dpo;
  throw ParseError("unknown loss '" + std::string(text) + "' (expected ce, kl or dpo)");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ValidationError("batch size must be > 0");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight decay must be >= 0");
  if (!(dpo_beta > 0.0)) throw ValidationError("dpo beta must be > 0");
  if (!(soft_temperature > 0.0)) throw ValidationError("soft label temperature must be > 0");
  if (layers < 1 || layers > 3) throw ValidationError("head depth must be 1, 2 or 3");
  if (layers > 1 && hidden == 0) throw ValidationError("hidden width must be > 0");
}

TrainResult train(const Dataset& train_set, HeadModel model, const TrainConfig& cfg,
                  const HeadModel* reference, const Dataset* test_set) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  if (cfg.loss == LossKind::dpo && reference == nullptr) {
    throw std::invalid_argument("DPO training needs a reference checkpoint");
  }

  const std::size_t n = train_set.size();
  std::vector<FeatureVector> features(n);
  for (std::size_t i = 0; i < n; ++i) features[i] = encode(train_set[i].context);

  // Per-sample targets, fixed for the whole run.
  std::vector<std::size_t> hard(n), worst(n);
  std::vector<PerAction> soft;
  std::vector<PerAction> ref_logits;
  TrainReport report;
  for (std::size_t i = 0; i < n; ++i) {
    hard[i] = argmax(train_set[i].rewards.objective);
    worst[i] = argmin(train_set[i].rewards.objective);
  }
  if (cfg.loss == LossKind::kl) {
    soft.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      soft[i] = soft_labels(train_set[i].rewards.objective, cfg.soft_temperature);
    }
  }
  if (cfg.loss == LossKind::dpo) {
    ref_logits.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      ref_logits[i] = reference->forward(features[i]);
      if (hard[i] == worst[i]) ++report.dpo_skipped;
    }
  }

  std::mt19937_64 rng(cfg.seed ^ kShuffleStream);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  AdamW opt(model.parameters().size(), cfg);
  std::vector<double> grad(model.parameters().size());
  HeadModel::Trace trace;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      std::size_t used = 0;
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        if (cfg.loss == LossKind::dpo && hard[i] == worst[i]) continue;
        const PerAction logits = model.forward(features[i], trace);
        LossValue lv;
        switch (cfg.loss) {
          case LossKind::ce: lv = loss_ce(logits, hard[i]); break;
          case LossKind::kl: lv = loss_kl(logits, soft[i]); break;
          case LossKind::dpo:
            lv = loss_dpo(logits, ref_logits[i], hard[i], worst[i], cfg.dpo_beta);
            break;
        }
        if (!std::isfinite(lv.value)) {
          throw DivergenceError("non-finite " + std::string(name(cfg.loss)) + " loss at epoch " +
                                std::to_string(epoch + 1) + ", step " +
                                std::to_string(report.steps + 1));
        }
        batch_loss += lv.value;
        model.backward(trace, lv.dlogits, grad);
        ++used;
      }
      if (used == 0) continue;
      const double scale = 1.0 / static_cast<double>(used);
      for (double& g : grad) g *= scale;
      opt.step(model.parameters(), grad);
      ++report.steps;
      epoch_loss += batch_loss;
      epoch_count += used;
    }
    if (!model.all_finite()) {
      throw DivergenceError("non-finite parameters after epoch " + std::to_string(epoch + 1));
    }
    report.epoch_mean_loss.push_back(epoch_count ? epoch_loss / static_cast<double>(epoch_count) : 0.0);
  }

  report.train_accuracy = accuracy_vs_oracle(model, train_set);
  if (test_set != nullptr && !test_set->empty()) {
    report.test_accuracy = accuracy_vs_oracle(model, *test_set);
  }
  return TrainResult{std::move(model), std::move(report)};
}

Action head_decide(const HeadModel& model, const Context& context) {
  return action_from_index(argmax(model.forward(encode(context))));
}

double accuracy_vs_oracle(const HeadModel& model, const Dataset& dataset) {
  if (dataset.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : dataset) {
    if (head_decide(model, s.context).index() == argmax(s.rewards.objective)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

Action HeadPolicy::decide(const Context& context, const PerAction&) const {
  if (!mask_peer_ || !context.subscriber_battery) return head_decide(model_, context);
  Context masked = context;
  masked.subscriber_battery.reset();
  return head_decide(model_, masked);
}

}  // namespace wapsel
