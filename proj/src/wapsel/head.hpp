#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wapsel/domain.hpp"

namespace wapsel {

inline constexpr std::size_t kFeatureDim = 15;
inline constexpr std::size_t kDefaultHiddenWidth = 64;
inline constexpr std::size_t kDefaultHeadLayers = 3;

// Layout: one-hot time (0-3) | publisher battery / 100 (4) |
// subscriber battery / 100 or 0 (5) | peer-visible flag (6) |
// normalized app histogram over the window (7-14).
using FeatureVector = std::array<double, kFeatureDim>;

FeatureVector encode(const Context& context);

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Stack of dense layers from kFeatureDim to kNumActions with rectifiers
// between layers and an affine output. Parameters are stored flat, layer by
// layer, each as a row-major [out x in] weight block followed by the bias.
class HeadModel {
 public:
  // Per-layer inputs and pre-activations of one forward pass.
  struct Trace {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> pre;
  };

  HeadModel() = default;
  // Throws std::invalid_argument unless shapes chain from kFeatureDim to kNumActions.
  HeadModel(std::vector<LayerShape> shapes, std::vector<double> parameters);

  static std::vector<LayerShape> make_shapes(std::size_t layers, std::size_t hidden);
  static HeadModel zeros(std::size_t layers, std::size_t hidden = kDefaultHiddenWidth);
  // He-uniform weights and zero biases.
  static HeadModel initialized(std::size_t layers, std::size_t hidden, std::uint64_t seed);

  std::size_t layer_count() const { return shapes_.size(); }
  std::size_t hidden_width() const;
  std::span<const LayerShape> shapes() const { return shapes_; }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + shapes_[layer].in * shapes_[layer].out;
  }

  // Throws std::invalid_argument when x.size() != kFeatureDim.
  PerAction forward(std::span<const double> x) const;
  PerAction forward(std::span<const double> x, Trace& trace) const;

  // Adds dL/dparameters for one example into grad.
  void backward(const Trace& trace, const PerAction& dlogits, std::span<double> grad) const;

  bool all_finite() const;
  friend bool operator==(const HeadModel&, const HeadModel&) = default;

 private:
  std::vector<LayerShape> shapes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace wapsel
