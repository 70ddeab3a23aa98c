#include "wapsel/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wapsel {

PerAction log_softmax(const PerAction& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - top);
  const double lse = top + std::log(sum);
  PerAction out{};
  for (std::size_t i = 0; i < kNumActions; ++i) out[i] = logits[i] - lse;
  return out;
}

PerAction softmax(const PerAction& logits) {
  PerAction p = log_softmax(logits);
  for (double& v : p) v = std::exp(v);
  return p;
}

LossValue loss_ce(const PerAction& logits, std::size_t label) {
  if (label >= kNumActions) throw std::out_of_range("label outside [0,7]");
  const PerAction ls = log_softmax(logits);
  LossValue out;
  out.value = -ls[label];
  for (std::size_t i = 0; i < kNumActions; ++i) out.dlogits[i] = std::exp(ls[i]);
  out.dlogits[label] -= 1.0;
  return out;
}

LossValue loss_kl(const PerAction& logits, const PerAction& soft) {
  const PerAction ls = log_softmax(logits);
  LossValue out;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    if (soft[i] > 0.0) out.value += soft[i] * (std::log(soft[i]) - ls[i]);
    out.dlogits[i] = std::exp(ls[i]) - soft[i];
  }
  return out;
}

double neg_log_sigmoid(double x) {
  // softplus(-x)
  return std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

LossValue loss_dpo(const PerAction& policy_logits, const PerAction& reference_logits,
                   std::size_t preferred, std::size_t dispreferred, double beta) {
  if (preferred >= kNumActions || dispreferred >= kNumActions) {
    throw std::out_of_range("preference index outside [0,7]");
  }
  if (preferred == dispreferred) throw std::invalid_argument("preferred equals dispreferred");
  const PerAction lp = log_softmax(policy_logits);
  const PerAction lr = log_softmax(reference_logits);
  const double margin =
      beta * ((lp[preferred] - lr[preferred]) - (lp[dispreferred] - lr[dispreferred]));
  LossValue out;
  out.value = neg_log_sigmoid(margin);
  // d/dmargin = -sigmoid(-margin); the softmax terms of the two log-probs cancel.
  const double g = -beta / (1.0 + std::exp(margin));
  out.dlogits[preferred] = g;
  out.dlogits[dispreferred] = -g;
  return out;
}

}  // namespace wapsel
