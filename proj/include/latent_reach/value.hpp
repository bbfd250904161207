#pragma once

#include <cstddef>
#include <functional>

#include "latent_reach/core.hpp"
#include "latent_reach/valuenet.hpp"

namespace latent_reach {

/// Anything that scores latent states: a trained network, an exact oracle or
/// an analytic test double. value() must be pure and safe to call concurrently.
class ValueFunction {
 public:
  virtual ~ValueFunction() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(const LatentPoint& z) const = 0;

  double operator()(const LatentPoint& z) const { return value(z); }
};

class NetworkValue final : public ValueFunction {
 public:
  explicit NetworkValue(const ValueNetwork& net) : net_(net) {}
  std::size_t dim() const override { return net_.input_dim(); }
  double value(const LatentPoint& z) const override { return net_.forward(z); }

 private:
  const ValueNetwork& net_;
};

class FunctionValue final : public ValueFunction {
 public:
  FunctionValue(std::size_t dim, std::function<double(const LatentPoint&)> fn) : dim_(dim), fn_(std::move(fn)) {}
  std::size_t dim() const override { return dim_; }
  double value(const LatentPoint& z) const override { return fn_(z); }

 private:
  std::size_t dim_;
  std::function<double(const LatentPoint&)> fn_;
};

}  // namespace latent_reach
