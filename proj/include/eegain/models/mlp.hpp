#pragma once

// Fully connected ReLU network with a softmax output, trained with Adam on
// label-smoothed cross-entropy. Gradients are derived by hand.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "eegain/error.hpp"
#include "eegain/rng.hpp"

namespace eegain {

struct MlpLayout {
  std::size_t input = 0;
  std::vector<std::size_t> hidden;
  std::size_t output = 0;

  /// Layer widths including input and output.
  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w{input};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(output);
    return w;
  }
};

class Mlp {
 public:
  Mlp() = default;

  /// He-style uniform initialization, U(-sqrt(6/fan_in), sqrt(6/fan_in)) for
  /// weights, zero biases.
  Mlp(MlpLayout layout, std::uint64_t seed) : layout_(std::move(layout)) {
    require(layout_.input >= 1 && layout_.output >= 1, "mlp: empty input or output layer");
    for (auto h : layout_.hidden) require(h >= 1, "mlp: hidden sizes must be >= 1");
    const auto w = layout_.widths();
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
      layers_.push_back({w[l], w[l + 1], offset, offset + w[l] * w[l + 1]});
      offset += w[l] * w[l + 1] + w[l + 1];
    }
    params_.assign(offset, 0.0);
    Rng rng(seed);
    for (const auto& layer : layers_) {
      const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
      for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
        params_[layer.weight_offset + i] = rng.uniform(-limit, limit);
      }
    }
  }

  const MlpLayout& layout() const { return layout_; }
  std::size_t n_params() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  /// Biases of the output layer, for closed-form checks.
  std::span<double> output_bias() {
    const auto& l = layers_.back();
    return std::span<double>(params_).subspan(l.bias_offset, l.out);
  }
  std::span<double> output_weights() {
    const auto& l = layers_.back();
    return std::span<double>(params_).subspan(l.weight_offset, l.in * l.out);
  }

  /// Output logits for one sample.
  std::vector<double> logits(std::span<const double> x) const {
    require(x.size() == layout_.input, "mlp: input dimension mismatch");
    std::vector<double> a(x.begin(), x.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      a = affine(layers_[l], a);
      if (l + 1 < layers_.size())
        for (double& v : a) v = std::max(v, 0.0);
    }
    return a;
  }

  /// Softmax probabilities for one sample.
  std::vector<double> probabilities(std::span<const double> x) const {
    return softmax(logits(x));
  }

  static std::vector<double> softmax(std::vector<double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
      v = std::exp(v - m);
      sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
  }

  /// Mean label-smoothed cross-entropy over a row-major batch
  /// (x.size() == labels.size() * input). Target = (1 - eps) one-hot + eps / K.
  double loss(std::span<const double> x, std::span<const int> labels, double smoothing) const {
    return evaluate(x, labels, smoothing, nullptr);
  }

  /// Loss as above; writes d loss / d params into `grad` (same layout as
  /// params()).
  double loss_and_gradient(std::span<const double> x, std::span<const int> labels,
                           double smoothing, std::span<double> grad) const {
    require(grad.size() == params_.size(), "mlp: gradient buffer has wrong size");
    return evaluate(x, labels, smoothing, &grad);
  }

 private:
  struct Layer {
    std::size_t in, out;
    std::size_t weight_offset;  // out x in, row-major
    std::size_t bias_offset;
  };

  std::vector<double> affine(const Layer& layer, std::span<const double> a) const {
    std::vector<double> z(layer.out);
    const double* w = params_.data() + layer.weight_offset;
    const double* b = params_.data() + layer.bias_offset;
    for (std::size_t o = 0; o < layer.out; ++o) {
      double acc = b[o];
      const double* row = w + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * a[i];
      z[o] = acc;
    }
    return z;
  }

  double evaluate(std::span<const double> x, std::span<const int> labels, double smoothing,
                  std::span<double>* grad) const {
    const std::size_t batch = labels.size();
    require(batch > 0, "mlp: empty batch");
    require(x.size() == batch * layout_.input, "mlp: batch dimension mismatch");
    require(smoothing >= 0.0 && smoothing < 1.0, "mlp: label smoothing must lie in [0, 1)");
    const std::size_t k = layout_.output;
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);

    double total = 0.0;
    std::vector<std::vector<double>> acts(layers_.size() + 1);
    for (std::size_t s = 0; s < batch; ++s) {
      const int y = labels[s];
      require(y >= 0 && static_cast<std::size_t>(y) < k, "mlp: label out of range");
      acts[0].assign(x.begin() + static_cast<std::ptrdiff_t>(s * layout_.input),
                     x.begin() + static_cast<std::ptrdiff_t>((s + 1) * layout_.input));
      for (std::size_t l = 0; l < layers_.size(); ++l) {
        acts[l + 1] = affine(layers_[l], acts[l]);
        if (l + 1 < layers_.size())
          for (double& v : acts[l + 1]) v = std::max(v, 0.0);
      }
      const auto& z = acts.back();
      const double m = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (double v : z) sum += std::exp(v - m);
      const double log_sum = m + std::log(sum);
      std::vector<double> delta(k);
      for (std::size_t c = 0; c < k; ++c) {
        const double target = (static_cast<std::size_t>(y) == c ? 1.0 - smoothing : 0.0) +
                              smoothing / static_cast<double>(k);
        total -= target * (z[c] - log_sum);
        delta[c] = (std::exp(z[c] - log_sum) - target) / static_cast<double>(batch);
      }
      if (!grad) continue;

      for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        const auto& a_in = acts[l];
        double* gw = grad->data() + layer.weight_offset;
        double* gb = grad->data() + layer.bias_offset;
        for (std::size_t o = 0; o < layer.out; ++o) {
          gb[o] += delta[o];
          double* row = gw + o * layer.in;
          for (std::size_t i = 0; i < layer.in; ++i) row[i] += delta[o] * a_in[i];
        }
        if (l == 0) break;
        std::vector<double> prev(layer.in, 0.0);
        const double* w = params_.data() + layer.weight_offset;
        for (std::size_t o = 0; o < layer.out; ++o) {
          const double* row = w + o * layer.in;
          for (std::size_t i = 0; i < layer.in; ++i) prev[i] += row[i] * delta[o];
        }
        // ReLU derivative, taken as 0 at exactly 0.
        for (std::size_t i = 0; i < layer.in; ++i)
          if (a_in[i] <= 0.0) prev[i] = 0.0;
        delta = std::move(prev);
      }
    }
    return total / static_cast<double>(batch);
  }

  MlpLayout layout_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n, AdamConfig config) : config_(config), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
      const double m_hat = m_[i] / c1;
      const double v_hat = v_[i] / c2;
      params[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }

 private:
  AdamConfig config_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
};

inline constexpr double kGradientCheckStep = 1e-5;
inline constexpr double kGradientCheckFloor = 1e-6;

/// Largest relative error between the analytic gradient and central finite
/// differences (step 1e-5) over every parameter. Relative error is
/// |a - n| / max(|a|, |n|, 1e-6).
inline double gradient_check(const Mlp& net, std::span<const double> x,
                             std::span<const int> labels, double smoothing) {
  require(labels.size() <= 8, "gradient check expects a batch of at most 8 samples");
  Mlp probe = net;
  std::vector<double> analytic(probe.n_params());
  probe.loss_and_gradient(x, labels, smoothing, analytic);
  double worst = 0.0;
  auto params = probe.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + kGradientCheckStep;
    const double up = probe.loss(x, labels, smoothing);
    params[i] = saved - kGradientCheckStep;
    const double down = probe.loss(x, labels, smoothing);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * kGradientCheckStep);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kGradientCheckFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace eegain
