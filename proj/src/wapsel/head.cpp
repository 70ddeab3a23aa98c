#include "wapsel/head.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wapsel {

FeatureVector encode(const Context& context) {
  FeatureVector x{};
  x[code(context.time)] = 1.0;
  x[4] = context.publisher_battery / 100.0;
  if (context.subscriber_battery) {
    x[5] = *context.subscriber_battery / 100.0;
    x[6] = 1.0;
  }
  std::array<std::size_t, kNumApps> counts{};
  for (AppType app : context.app_history) ++counts[code(app)];
  const double n = static_cast<double>(context.app_history.size());
  for (std::size_t a = 0; a < kNumApps; ++a) x[7 + a] = static_cast<double>(counts[a]) / n;
  return x;
}

HeadModel::HeadModel(std::vector<LayerShape> shapes, std::vector<double> parameters)
    : shapes_(std::move(shapes)), params_(std::move(parameters)) {
  if (shapes_.empty()) throw std::invalid_argument("head needs at least one layer");
  if (shapes_.front().in != kFeatureDim || shapes_.back().out != kNumActions) {
    throw std::invalid_argument("head must map 15 features to 8 logits");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    if (l > 0 && shapes_[l].in != shapes_[l - 1].out) {
      throw std::invalid_argument("layer shapes do not chain");
    }
    if (shapes_[l].in == 0 || shapes_[l].out == 0) throw std::invalid_argument("empty layer");
    offsets_.push_back(total);
    total += shapes_[l].in * shapes_[l].out + shapes_[l].out;
  }
  if (params_.size() != total) {
    throw std::invalid_argument("expected " + std::to_string(total) + " parameters, got " +
                                std::to_string(params_.size()));
  }
}

std::vector<LayerShape> HeadModel::make_shapes(std::size_t layers, std::size_t hidden) {
  if (layers < 1) throw std::invalid_argument("head needs at least one layer");
  if (layers > 1 && hidden == 0) throw std::invalid_argument("hidden width must be > 0");
  std::vector<LayerShape> shapes;
  std::size_t in = kFeatureDim;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t out = (l + 1 == layers) ? kNumActions : hidden;
    shapes.push_back({in, out});
    in = out;
  }
  return shapes;
}

HeadModel HeadModel::zeros(std::size_t layers, std::size_t hidden) {
  auto shapes = make_shapes(layers, hidden);
  std::size_t total = 0;
  for (const auto& s : shapes) total += s.in * s.out + s.out;
  return HeadModel(std::move(shapes), std::vector<double>(total, 0.0));
}

HeadModel HeadModel::initialized(std::size_t layers, std::size_t hidden, std::uint64_t seed) {
  HeadModel m = zeros(layers, hidden);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    const auto& s = m.shapes_[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(s.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    auto w = m.params_.begin() + static_cast<std::ptrdiff_t>(m.weight_offset(l));
    for (std::size_t k = 0; k < s.in * s.out; ++k) w[static_cast<std::ptrdiff_t>(k)] = u(rng);
  }
  return m;
}

std::size_t HeadModel::hidden_width() const {
  return shapes_.size() > 1 ? shapes_.front().out : 0;
}

PerAction HeadModel::forward(std::span<const double> x) const {
  Trace unused;
  return forward(x, unused);
}

PerAction HeadModel::forward(std::span<const double> x, Trace& trace) const {
  if (shapes_.empty()) throw std::invalid_argument("forward on an empty head");
  if (x.size() != shapes_.front().in) {
    throw std::invalid_argument("feature vector has " + std::to_string(x.size()) +
                                " entries, head expects " + std::to_string(shapes_.front().in));
  }
  trace.inputs.resize(shapes_.size());
  trace.pre.resize(shapes_.size());
  std::vector<double> act(x.begin(), x.end());
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    const auto& s = shapes_[l];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    std::vector<double> z(s.out);
    for (std::size_t o = 0; o < s.out; ++o) {
      double acc = b[o];
      const double* row = w + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) acc += row[i] * act[i];
      z[o] = acc;
    }
    trace.inputs[l] = std::move(act);
    act = z;
    if (l + 1 < shapes_.size()) {
      for (double& v : act) v = std::max(v, 0.0);
    }
    trace.pre[l] = std::move(z);
  }
  PerAction logits{};
  std::copy(act.begin(), act.end(), logits.begin());
  return logits;
}

void HeadModel::backward(const Trace& trace, const PerAction& dlogits, std::span<double> grad) const {
  std::vector<double> delta(dlogits.begin(), dlogits.end());
  for (std::size_t l = shapes_.size(); l-- > 0;) {
    const auto& s = shapes_[l];
    const auto& input = trace.inputs[l];
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    for (std::size_t o = 0; o < s.out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      if (d == 0.0) continue;
      double* row = gw + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) row[i] += d * input[i];
    }
    if (l == 0) break;
    // Propagate through the weights, then the previous layer's rectifier.
    const double* w = params_.data() + weight_offset(l);
    const auto& prev_pre = trace.pre[l - 1];
    std::vector<double> next(s.in, 0.0);
    for (std::size_t o = 0; o < s.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) next[i] += row[i] * d;
    }
    for (std::size_t i = 0; i < s.in; ++i) {
      if (prev_pre[i] <= 0.0) next[i] = 0.0;
    }
    delta = std::move(next);
  }
}

bool HeadModel::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace wapsel
