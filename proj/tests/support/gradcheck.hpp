#pragma once

// Finite-difference gradient checks for the head and losses.

#include <cstdint>

#include "wapsel/trainer.hpp"

namespace gradcheck {

struct Result {
  int points = 0;
  double max_relative_error = 0.0;
};

// Central differences (h = 1e-4) over every parameter of random heads with
// hidden width 8-16. Points with a hidden pre-activation within 1e-3 of zero
// are redrawn. Relative error is ||a - n|| / max(||a||, ||n||).
Result run(std::size_t layers, wapsel::LossKind loss, std::uint64_t seed, int points);

}  // namespace gradcheck
