#include "latent_reach/valuenet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "latent_reach/kernels.hpp"

namespace latent_reach {

template <typename T>
Parameters<T> Parameters<T>::filled(const NetworkShape& shape, T value) {
  if (shape.input_dim == 0 || shape.hidden1 == 0 || shape.hidden2 == 0) {
    throw DimensionError("network dimensions must be positive");
  }
  Parameters p;
  p.shape = shape;
  const auto [d, h1, h2] = shape;
  p.w1.assign(h1 * d, value);
  p.b1.assign(h1, value);
  p.ln1_gain.assign(h1, value);
  p.ln1_bias.assign(h1, value);
  p.w2.assign(h2 * h1, value);
  p.b2.assign(h2, value);
  p.ln2_gain.assign(h2, value);
  p.ln2_bias.assign(h2, value);
  p.w3.assign(h2, value);
  p.b3.assign(1, value);
  return p;
}

template <typename T>
std::array<std::span<T>, kTensorCount> Parameters<T>::tensors() {
  return {w1, b1, ln1_gain, ln1_bias, w2, b2, ln2_gain, ln2_bias, w3, b3};
}

template <typename T>
std::array<std::span<const T>, kTensorCount> Parameters<T>::tensors() const {
  return {w1, b1, ln1_gain, ln1_bias, w2, b2, ln2_gain, ln2_bias, w3, b3};
}

template <typename T>
std::size_t Parameters<T>::size() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

template <typename T>
void Parameters<T>::fill(T value) {
  for (auto t : tensors()) std::fill(t.begin(), t.end(), value);
}

namespace {

// Normalized activations and the inverse std, kept for the backward pass.
template <typename T>
void layer_norm_forward(std::span<const T> x, std::span<const T> gain, std::span<const T> bias, double eps,
                        std::span<T> xhat, std::span<T> y, T& inv_std) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (T v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (T v : x) {
    const double c = v - mean;
    var += c * c;
  }
  var /= static_cast<double>(n);
  const double inv = 1.0 / std::sqrt(var + eps);
  inv_std = static_cast<T>(inv);
  for (std::size_t i = 0; i < n; ++i) {
    xhat[i] = static_cast<T>((x[i] - mean) * inv);
    y[i] = gain[i] * xhat[i] + bias[i];
  }
}

// dx = inv_std * (dxhat - mean(dxhat) - xhat * mean(dxhat * xhat))
template <typename T>
void layer_norm_backward(std::span<const T> dxhat, std::span<const T> xhat, T inv_std, std::span<T> dx) {
  const std::size_t n = dxhat.size();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += dxhat[i];
    m2 += static_cast<double>(dxhat[i]) * xhat[i];
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = static_cast<T>(inv_std * (dxhat[i] - m1 - xhat[i] * m2));
  }
}

template <typename T>
struct Workspace {
  std::vector<T> a1, xhat1, y1, r1;
  std::vector<T> a2, xhat2, y2, r2;
  std::vector<T> d2, d1, dr1;
  T inv_std1{}, inv_std2{};

  explicit Workspace(const NetworkShape& s)
      : a1(s.hidden1), xhat1(s.hidden1), y1(s.hidden1), r1(s.hidden1),
        a2(s.hidden2), xhat2(s.hidden2), y2(s.hidden2), r2(s.hidden2),
        d2(s.hidden2), d1(s.hidden1), dr1(s.hidden1) {}
};

template <typename T>
T forward_into(const Parameters<T>& p, std::span<const T> z, Workspace<T>& ws) {
  if (z.size() != p.shape.input_dim) {
    throw DimensionError("value network expects input dim " + std::to_string(p.shape.input_dim) + ", got " +
                         std::to_string(z.size()));
  }
  kernels::omp::affine<T>(p.w1, p.b1, z, ws.a1);
  layer_norm_forward<T>(ws.a1, p.ln1_gain, p.ln1_bias, kLayerNormEps, ws.xhat1, ws.y1, ws.inv_std1);
  for (std::size_t i = 0; i < ws.y1.size(); ++i) ws.r1[i] = std::max(ws.y1[i], T(0));
  kernels::omp::affine<T>(p.w2, p.b2, ws.r1, ws.a2);
  layer_norm_forward<T>(ws.a2, p.ln2_gain, p.ln2_bias, kLayerNormEps, ws.xhat2, ws.y2, ws.inv_std2);
  for (std::size_t i = 0; i < ws.y2.size(); ++i) ws.r2[i] = std::max(ws.y2[i], T(0));
  T out = p.b3[0];
  for (std::size_t i = 0; i < ws.r2.size(); ++i) out += p.w3[i] * ws.r2[i];
  return out;
}

// Accumulates delta * dV/dparams into g, using activations cached in ws.
template <typename T>
void backward_into(const Parameters<T>& p, std::span<const T> z, Workspace<T>& ws, T delta, Parameters<T>& g) {
  const std::size_t h1 = p.shape.hidden1, h2 = p.shape.hidden2;
  for (std::size_t i = 0; i < h2; ++i) g.w3[i] += delta * ws.r2[i];
  g.b3[0] += delta;

  // ws.d2 holds dL/dy2, then dL/dxhat2, then dL/da2
  for (std::size_t i = 0; i < h2; ++i) ws.d2[i] = ws.y2[i] > T(0) ? delta * p.w3[i] : T(0);
  for (std::size_t i = 0; i < h2; ++i) {
    g.ln2_gain[i] += ws.d2[i] * ws.xhat2[i];
    g.ln2_bias[i] += ws.d2[i];
    ws.d2[i] *= p.ln2_gain[i];
  }
  layer_norm_backward<T>(ws.d2, ws.xhat2, ws.inv_std2, ws.d2);
  kernels::omp::rank1_update<T>(g.w2, ws.d2, ws.r1);
  for (std::size_t i = 0; i < h2; ++i) g.b2[i] += ws.d2[i];

  kernels::omp::affine_transpose<T>(p.w2, ws.d2, ws.dr1);
  for (std::size_t i = 0; i < h1; ++i) ws.d1[i] = ws.y1[i] > T(0) ? ws.dr1[i] : T(0);
  for (std::size_t i = 0; i < h1; ++i) {
    g.ln1_gain[i] += ws.d1[i] * ws.xhat1[i];
    g.ln1_bias[i] += ws.d1[i];
    ws.d1[i] *= p.ln1_gain[i];
  }
  layer_norm_backward<T>(ws.d1, ws.xhat1, ws.inv_std1, ws.d1);
  kernels::omp::rank1_update<T>(g.w1, ws.d1, z);
  for (std::size_t i = 0; i < h1; ++i) g.b1[i] += ws.d1[i];
}

}  // namespace

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gain, std::span<const double> bias,
                               double eps) {
  if (x.empty() || gain.size() != x.size() || bias.size() != x.size()) {
    throw DimensionError("layer_norm: input, gain and bias must share a positive length");
  }
  std::vector<double> xhat(x.size()), y(x.size());
  double inv_std = 0.0;
  if (eps == 0.0) {
    // exact limit: constant inputs normalize to zero rather than 0/0
    double mean = 0.0, var = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double n = var > 0.0 ? (x[i] - mean) / std::sqrt(var) : 0.0;
      y[i] = gain[i] * n + bias[i];
    }
    return y;
  }
  layer_norm_forward<double>(x, gain, bias, eps, xhat, y, inv_std);
  return y;
}

template <typename T>
BasicValueNetwork<T>::BasicValueNetwork(const NetworkShape& shape) : params_(Parameters<T>::filled(shape, T(0))) {
  std::fill(params_.ln1_gain.begin(), params_.ln1_gain.end(), T(1));
  std::fill(params_.ln2_gain.begin(), params_.ln2_gain.end(), T(1));
}

template <typename T>
BasicValueNetwork<T>::BasicValueNetwork(Parameters<T> params, std::uint64_t seed)
    : params_(std::move(params)), seed_(seed) {
  const Parameters<T> expect = Parameters<T>::filled(params_.shape, T(0));
  const auto have = params_.tensors();
  const auto want = expect.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    if (have[i].size() != want[i].size()) throw DimensionError("parameter tensor size does not match shape");
  }
}

template <typename T>
BasicValueNetwork<T> BasicValueNetwork<T>::initialized(const NetworkShape& shape, std::uint64_t seed) {
  BasicValueNetwork net(shape);
  net.seed_ = seed;
  std::mt19937_64 rng(seed);
  auto init = [&rng](std::vector<T>& w, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (T& x : w) x = static_cast<T>(dist(rng));
  };
  init(net.params_.w1, shape.input_dim);
  init(net.params_.w2, shape.hidden1);
  init(net.params_.w3, shape.hidden2);
  return net;
}

template <typename T>
T BasicValueNetwork<T>::forward(std::span<const T> z) const {
  Workspace<T> ws(params_.shape);
  return forward_into(params_, z, ws);
}

template <typename T>
double BasicValueNetwork<T>::forward(const LatentPoint& z) const {
  std::vector<T> x(z.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<T>(z[i]);
  return static_cast<double>(forward(std::span<const T>(x)));
}

template <typename T>
template <typename U>
BasicValueNetwork<U> BasicValueNetwork<T>::cast() const {
  Parameters<U> out = Parameters<U>::filled(params_.shape, U(0));
  auto dst = out.tensors();
  const auto src = params_.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    std::transform(src[i].begin(), src[i].end(), dst[i].begin(), [](T v) { return static_cast<U>(v); });
  }
  return BasicValueNetwork<U>(std::move(out), seed_);
}

template <typename T>
double loss_and_grads_into(const BasicValueNetwork<T>& net, std::span<const WeightedSample<T>> batch,
                           Parameters<T>& grads, std::optional<double> normalizer) {
  if (batch.empty()) throw Error("empty batch");
  const auto& p = net.params();
  if (grads.shape != p.shape) grads = Parameters<T>::filled(p.shape, T(0));
  else grads.fill(T(0));

  double total_weight = 0.0;
  for (const auto& s : batch) {
    if (!(s.weight > 0.0)) throw Error("sample weights must be positive");
    total_weight += s.weight;
  }
  const double norm = normalizer.value_or(total_weight);
  if (!(norm > 0.0)) throw Error("loss normalizer must be positive");

  Workspace<T> ws(p.shape);
  double loss = 0.0;
  for (const auto& s : batch) {
    const double err = static_cast<double>(forward_into(p, s.z, ws)) - s.target;
    loss += s.weight * err * err;
    backward_into(p, s.z, ws, static_cast<T>(2.0 * s.weight * err / norm), grads);
  }
  loss /= norm;
  if (!std::isfinite(loss)) throw Error("numerical overflow");
  return loss;
}

template <typename T>
LossAndGrads<T> loss_and_grads(const BasicValueNetwork<T>& net, std::span<const WeightedSample<T>> batch,
                               std::optional<double> normalizer) {
  LossAndGrads<T> out{0.0, Parameters<T>::filled(net.shape(), T(0))};
  out.loss = loss_and_grads_into(net, batch, out.grads, normalizer);
  return out;
}

template <typename T>
OptimizerState<T> OptimizerState<T>::fresh(const NetworkShape& shape, const AdamHyper& hyper) {
  return OptimizerState{0, Parameters<T>::filled(shape, T(0)), Parameters<T>::filled(shape, T(0)), hyper};
}

template <typename T>
void adam_step(Parameters<T>& params, const Parameters<T>& grads, OptimizerState<T>& state) {
  if (grads.shape != params.shape || state.m.shape != params.shape || state.v.shape != params.shape) {
    throw DimensionError("adam_step: parameter, gradient and moment shapes differ");
  }
  const AdamHyper& h = state.hyper;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(h.beta1, t);
  const double bc2 = 1.0 - std::pow(h.beta2, t);

  auto ps = params.tensors();
  const auto gs = grads.tensors();
  auto ms = state.m.tensors();
  auto vs = state.v.tensors();
  for (std::size_t k = 0; k < kTensorCount; ++k) {
    auto p = ps[k];
    auto g = gs[k];
    auto m = ms[k];
    auto v = vs[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      const double mi = h.beta1 * m[i] + (1.0 - h.beta1) * gi;
      const double vi = h.beta2 * v[i] + (1.0 - h.beta2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double mhat = mi / bc1;
      const double vhat = vi / bc2;
      const double pi = p[i];
      p[i] = static_cast<T>(pi - h.lr * (mhat / (std::sqrt(vhat) + h.eps)) - h.lr * h.weight_decay * pi);
    }
  }
}

template struct Parameters<float>;
template struct Parameters<double>;
template class BasicValueNetwork<float>;
template class BasicValueNetwork<double>;
template BasicValueNetwork<double> BasicValueNetwork<float>::cast<double>() const;
template BasicValueNetwork<float> BasicValueNetwork<double>::cast<float>() const;
template BasicValueNetwork<float> BasicValueNetwork<float>::cast<float>() const;
template BasicValueNetwork<double> BasicValueNetwork<double>::cast<double>() const;
template struct OptimizerState<float>;
template struct OptimizerState<double>;
template LossAndGrads<float> loss_and_grads(const BasicValueNetwork<float>&, std::span<const WeightedSample<float>>,
                                            std::optional<double>);
template LossAndGrads<double> loss_and_grads(const BasicValueNetwork<double>&,
                                             std::span<const WeightedSample<double>>, std::optional<double>);
template double loss_and_grads_into(const BasicValueNetwork<float>&, std::span<const WeightedSample<float>>,
                                    Parameters<float>&, std::optional<double>);
template double loss_and_grads_into(const BasicValueNetwork<double>&, std::span<const WeightedSample<double>>,
                                    Parameters<double>&, std::optional<double>);
template void adam_step(Parameters<float>&, const Parameters<float>&, OptimizerState<float>&);
template void adam_step(Parameters<double>&, const Parameters<double>&, OptimizerState<double>&);

}  // namespace latent_reach
