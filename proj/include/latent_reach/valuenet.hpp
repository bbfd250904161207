#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "latent_reach/core.hpp"

namespace latent_reach {

struct NetworkShape {
  std::size_t input_dim = 0;
  std::size_t hidden1 = 16384;
  std::size_t hidden2 = 64;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr std::size_t kTensorCount = 10;

/// Every trainable tensor of the value network. tensors() yields them in
/// checkpoint order: affine1 W,b; ln1 gain,bias; affine2 W,b; ln2 gain,bias;
/// affine3 W,b. Gradients and Adam moments reuse this layout.
template <typename T>
struct Parameters {
  NetworkShape shape;
  std::vector<T> w1, b1, ln1_gain, ln1_bias;
  std::vector<T> w2, b2, ln2_gain, ln2_bias;
  std::vector<T> w3, b3;

  /// All tensors sized for `shape` and filled with `value`.
  static Parameters filled(const NetworkShape& shape, T value);

  std::array<std::span<T>, kTensorCount> tensors();
  std::array<std::span<const T>, kTensorCount> tensors() const;

  std::size_t size() const;
  void fill(T value);

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

/// y_i = gain_i (x_i - mean) / sqrt(var + eps) + bias_i, biased variance.
std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gain,
                               std::span<const double> bias, double eps = kLayerNormEps);

/// Two hidden layers (affine -> layer norm -> ReLU) and a linear scalar head.
template <typename T>
class BasicValueNetwork {
 public:
  /// Zero affine weights and biases, layer-norm gain 1 and bias 0.
  explicit BasicValueNetwork(const NetworkShape& shape);
  explicit BasicValueNetwork(Parameters<T> params, std::uint64_t seed = 0);

  /// Fan-in init: affine weights uniform in +-1/sqrt(fan_in), biases zero.
  static BasicValueNetwork initialized(const NetworkShape& shape, std::uint64_t seed);

  const NetworkShape& shape() const { return params_.shape; }
  std::size_t input_dim() const { return params_.shape.input_dim; }
  std::uint64_t seed() const { return seed_; }

  Parameters<T>& params() { return params_; }
  const Parameters<T>& params() const { return params_; }

  T forward(std::span<const T> z) const;
  double forward(const LatentPoint& z) const;

  template <typename U>
  BasicValueNetwork<U> cast() const;

  friend bool operator==(const BasicValueNetwork&, const BasicValueNetwork&) = default;

 private:
  Parameters<T> params_;
  std::uint64_t seed_ = 0;
};

using ValueNetwork = BasicValueNetwork<float>;

template <typename T>
struct WeightedSample {
  std::span<const T> z;
  double target = 0.0;
  double weight = 1.0;
};

template <typename T>
struct LossAndGrads {
  double loss = 0.0;
  Parameters<T> grads;
};

/// loss = sum_i w_i (V(z_i) - y_i)^2 / normalizer, where the normalizer
/// defaults to sum_i w_i. Gradients are exact, through both layer norms.
/// Throws Error("numerical overflow") on a non-finite loss.
template <typename T>
LossAndGrads<T> loss_and_grads(const BasicValueNetwork<T>& net, std::span<const WeightedSample<T>> batch,
                               std::optional<double> normalizer = std::nullopt);

/// Same as above, writing into a preallocated gradient buffer (overwritten).
template <typename T>
double loss_and_grads_into(const BasicValueNetwork<T>& net, std::span<const WeightedSample<T>> batch,
                           Parameters<T>& grads, std::optional<double> normalizer = std::nullopt);

struct AdamHyper {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-5;
};

template <typename T>
struct OptimizerState {
  std::uint64_t step = 0;
  Parameters<T> m;
  Parameters<T> v;
  AdamHyper hyper;

  static OptimizerState fresh(const NetworkShape& shape, const AdamHyper& hyper = {});

  friend bool operator==(const OptimizerState& a, const OptimizerState& b) {
    return a.step == b.step && a.m == b.m && a.v == b.v;
  }
};

/// Bias-corrected Adam with decoupled weight decay:
///   p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * weight_decay * p
template <typename T>
void adam_step(Parameters<T>& params, const Parameters<T>& grads, OptimizerState<T>& state);

}  // namespace latent_reach
