#include <gtest/gtest.h>

#include <cstdio>

#include "oracles.hpp"
#include "wapsel/errors.hpp"
#include "wapsel/eval.hpp"
#include "wapsel/trainer.hpp"

using namespace wapsel;

namespace {

TrainConfig small_config(LossKind loss, std::uint64_t seed = 1) {
  TrainConfig c;
  c.loss = loss;
  c.seed = seed;
  c.layers = 2;
  c.hidden = 16;
  return c;
}

}  // namespace

TEST(TrainConfig, Validation) {
  EXPECT_NO_THROW(TrainConfig{}.validate());
  auto c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = TrainConfig{};
  c.layers = 4;
  EXPECT_THROW(c.validate(), ValidationError);
  c = TrainConfig{};
  c.dpo_beta = -1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = TrainConfig{};
  c.soft_temperature = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(TrainConfig, Defaults) {
  const TrainConfig c;
  EXPECT_EQ(c.epochs, 5u);
  EXPECT_EQ(c.batch_size, 64u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 1e-3);
  EXPECT_DOUBLE_EQ(c.weight_decay, 0.01);
  EXPECT_EQ(c.layers, 3u);
  EXPECT_EQ(c.hidden, 64u);
  EXPECT_EQ(c.loss, LossKind::kl);
}

TEST(LossKind, Names) {
  EXPECT_EQ(parse_enum<LossKind>("ce"), LossKind::ce);
  EXPECT_EQ(parse_enum<LossKind>("kl"), LossKind::kl);
  EXPECT_EQ(parse_enum<LossKind>("dpo"), LossKind::dpo);
  EXPECT_THROW(parse_enum<LossKind>("mse"), ParseError);
  EXPECT_EQ(name(LossKind::dpo), "dpo");
}

TEST(Train, ZeroEpochsLeavesModelUntouched) {
  const auto d = oracle::small_dataset(10, 3);
  auto cfg = small_config(LossKind::kl);
  cfg.epochs = 0;
  const auto init = HeadModel::initialized(cfg.layers, cfg.hidden, 5);
  const auto r = train(d, init, cfg);
  EXPECT_EQ(r.model, init);
  EXPECT_EQ(r.report.steps, 0u);
  EXPECT_TRUE(r.report.epoch_mean_loss.empty());
}

TEST(Train, StepCountAndDeterminism) {
  const auto d = oracle::small_dataset(10, 4);  // 160 samples
  auto cfg = small_config(LossKind::ce, 9);
  cfg.epochs = 3;
  const auto init = HeadModel::initialized(cfg.layers, cfg.hidden, 9);
  const auto a = train(d, init, cfg);
  const auto b = train(d, init, cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.report.epoch_mean_loss, b.report.epoch_mean_loss);
  EXPECT_EQ(a.report.steps, 3u * 3u);  // ceil(160 / 64) per epoch
  EXPECT_FALSE(a.model == init);

  cfg.seed = 10;
  const auto c = train(d, init, cfg);
  EXPECT_FALSE(a.model == c.model);
}

TEST(Train, LossDecreasesOnFixedData) {
  const auto d = oracle::small_dataset(40, 5);
  for (auto loss : {LossKind::ce, LossKind::kl}) {
    auto cfg = small_config(loss);
    cfg.epochs = 10;
    const auto r = train(d, HeadModel::initialized(cfg.layers, cfg.hidden, 1), cfg);
    ASSERT_EQ(r.report.epoch_mean_loss.size(), 10u);
    EXPECT_LT(r.report.epoch_mean_loss.back(), r.report.epoch_mean_loss.front()) << name(loss);
  }
}

TEST(Train, OverfitsSingleRepeatedSample) {
  const auto base = oracle::small_dataset(10, 6);
  for (std::size_t pick : {0u, 17u, 40u}) {
    const Dataset d(64, base[pick]);
    const std::size_t best = oracle::first_max(base[pick].rewards.objective);
    for (auto loss : {LossKind::ce, LossKind::kl}) {
      auto cfg = small_config(loss);
      cfg.epochs = 300;
      cfg.learning_rate = 1e-2;
      const auto r = train(d, HeadModel::initialized(cfg.layers, cfg.hidden, 2), cfg);
      EXPECT_EQ(head_decide(r.model, base[pick].context).index(), best) << name(loss);
      EXPECT_EQ(r.report.train_accuracy, 1.0);
    }
  }
}

TEST(Train, KlFitsSoftLabelsOfSingleSample) {
  const auto base = oracle::small_dataset(10, 7);
  const Dataset d(64, base[3]);
  auto cfg = small_config(LossKind::kl);
  cfg.epochs = 2000;
  cfg.learning_rate = 1e-2;
  cfg.weight_decay = 0.0;
  const auto r = train(d, HeadModel::initialized(cfg.layers, cfg.hidden, 3), cfg);
  const auto target = soft_labels(base[3].rewards.objective, 1.0);
  const auto logits = r.model.forward(encode(base[3].context));
  double z = 0.0;
  for (double v : logits) z += std::exp(v);
  for (std::size_t a = 0; a < 8; ++a) EXPECT_NEAR(std::exp(logits[a]) / z, target[a], 1e-3);
}

TEST(Train, DpoNeedsReferenceAndSkipsTies) {
  auto d = oracle::small_dataset(10, 8);
  auto cfg = small_config(LossKind::dpo);
  cfg.epochs = 1;
  const auto ref = HeadModel::initialized(cfg.layers, cfg.hidden, 4);
  EXPECT_THROW(train(d, ref, cfg), std::invalid_argument);

  for (std::size_t i = 0; i < 10; ++i) d[i].rewards.objective.fill(1.5);
  const auto r = train(d, ref, cfg, &ref);
  EXPECT_EQ(r.report.dpo_skipped, 10u);

  for (auto& s : d) s.rewards.objective.fill(0.0);
  const auto all = train(d, ref, cfg, &ref);
  EXPECT_EQ(all.report.dpo_skipped, d.size());
  EXPECT_EQ(all.report.steps, 0u);
  EXPECT_EQ(all.model, ref);
}

TEST(Train, DpoFirstStepLossIsLn2) {
  const auto d = oracle::small_dataset(10, 9);
  auto cfg = small_config(LossKind::dpo);
  cfg.epochs = 1;
  cfg.batch_size = d.size();
  const auto ref = HeadModel::initialized(cfg.layers, cfg.hidden, 4);
  const auto r = train(d, ref, cfg, &ref);
  ASSERT_EQ(r.report.steps, 1u);
  EXPECT_NEAR(r.report.epoch_mean_loss[0], std::log(2.0), 1e-12);
}

TEST(Train, DivergenceIsReported) {
  const auto d = oracle::small_dataset(10, 10);
  auto cfg = small_config(LossKind::ce);
  cfg.learning_rate = 1e300;
  cfg.layers = 3;
  cfg.epochs = 5;
  EXPECT_THROW(train(d, HeadModel::initialized(3, cfg.hidden, 1), cfg), DivergenceError);
}

TEST(Train, RejectsEmptyAndInvalid) {
  auto cfg = small_config(LossKind::ce);
  EXPECT_THROW(train({}, HeadModel::initialized(2, 16, 1), cfg), std::invalid_argument);
  cfg.batch_size = 0;
  EXPECT_THROW(train(oracle::small_dataset(10, 1), HeadModel::initialized(2, 16, 1), cfg), ValidationError);
}

TEST(HeadPolicy, MaskingMatchesMaskedContext) {
  std::mt19937_64 rng(11);
  const auto m = oracle::random_model(2, 12, rng);
  HeadPolicy masked(m, "masked", true), plain(m, "plain");
  for (int i = 0; i < 200; ++i) {
    auto c = oracle::random_context(rng);
    const auto a = masked.decide(c, PerAction{});
    c.subscriber_battery.reset();
    EXPECT_EQ(a, plain.decide(c, PerAction{}));
  }
}

// 500-sample toy training set, default training config, scored on a larger
// held-out set drawn from a different seed.
TEST(Train, ToyKlAtLeastCeInMostSeeds) {
  int kl_wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto tr = oracle::small_dataset(32, seed);
    tr.resize(500);
    const auto te = oracle::small_dataset(100, seed + 1000);
    double score[2]{};
    for (int k = 0; k < 2; ++k) {
      TrainConfig cfg;
      cfg.loss = k == 0 ? LossKind::ce : LossKind::kl;
      cfg.seed = seed;
      const auto r = train(tr, HeadModel::initialized(cfg.layers, cfg.hidden, seed), cfg);
      HeadPolicy p(r.model, "head");
      score[k] = evaluate(p, te, RewardConfig{}, ToleranceTable::defaults()).mean.objective;
    }
    if (score[1] >= score[0]) ++kl_wins;
    std::printf("seed %llu: ce %.4f kl %.4f\n", static_cast<unsigned long long>(seed), score[0], score[1]);
  }
  EXPECT_GE(kl_wins, 3);
}
