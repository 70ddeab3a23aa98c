#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "wapsel/losses.hpp"

using namespace wapsel;

class GradientCheck : public ::testing::TestWithParam<std::size_t> {};

TEST_P(GradientCheck, CrossEntropy) {
  const auto r = gradcheck::run(GetParam(), LossKind::ce, 100 + GetParam(), 100);
  EXPECT_EQ(r.points, 100);
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST_P(GradientCheck, KlDivergence) {
  const auto r = gradcheck::run(GetParam(), LossKind::kl, 200 + GetParam(), 100);
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST_P(GradientCheck, Preference) {
  const auto r = gradcheck::run(GetParam(), LossKind::dpo, 300 + GetParam(), 100);
  EXPECT_LE(r.max_relative_error, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Depths, GradientCheck, ::testing::Values(1u, 2u, 3u),
                         [](const auto& info) { return "layers" + std::to_string(info.param); });

TEST(Backward, AccumulatesIntoGradient) {
  std::mt19937_64 rng(9);
  const auto model = oracle::random_model(2, 10, rng);
  const auto x = oracle::random_features(rng);
  HeadModel::Trace trace;
  const auto z = model.forward(x, trace);
  const auto dl = loss_ce(z, 3).dlogits;
  std::vector<double> once(model.parameters().size(), 0.0), twice(once.size(), 0.0);
  model.backward(trace, dl, once);
  model.backward(trace, dl, twice);
  model.backward(trace, dl, twice);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_NEAR(twice[i], 2 * once[i], 1e-12);
}

TEST(Backward, ZeroUpstreamGivesZeroGradient) {
  std::mt19937_64 rng(10);
  const auto model = oracle::random_model(3, 12, rng);
  HeadModel::Trace trace;
  model.forward(oracle::random_features(rng), trace);
  std::vector<double> g(model.parameters().size(), 0.0);
  model.backward(trace, PerAction{}, g);
  for (double v : g) EXPECT_EQ(v, 0.0);
}
