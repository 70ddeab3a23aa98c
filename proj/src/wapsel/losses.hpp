#pragma once

#include "wapsel/domain.hpp"

namespace wapsel {

// Max-shifted log-softmax.
PerAction log_softmax(const PerAction& logits);
PerAction softmax(const PerAction& logits);

// Loss value and its gradient with respect to the logits.
struct LossValue {
  double value = 0.0;
  PerAction dlogits{};
};

// -log softmax(logits)[label]
LossValue loss_ce(const PerAction& logits, std::size_t label);

// KL(soft || softmax(logits)); zero-probability targets contribute nothing.
LossValue loss_kl(const PerAction& logits, const PerAction& soft);

// Pairwise preference loss on a single context:
//   -log sigmoid(beta * [(lp(w) - lr(w)) - (lp(l) - lr(l))])
// where lp/lr are the policy/reference log-probabilities. dlogits is with
// respect to the policy logits; the reference is frozen.
LossValue loss_dpo(const PerAction& policy_logits, const PerAction& reference_logits,
                   std::size_t preferred, std::size_t dispreferred, double beta);

// -log sigmoid(x), computed without overflow.
double neg_log_sigmoid(double x);

}  // namespace wapsel
