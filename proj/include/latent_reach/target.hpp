#pragma once

#include <functional>
#include <string>

#include "latent_reach/core.hpp"

namespace latent_reach {

/// A target function whose sub-zero level set is the failure set.
struct TargetFunction {
  std::string name;
  std::function<double(const LatentPoint&)> eval;

  double operator()(const LatentPoint& z) const { return eval(z); }
};

/// 0.5 - c for an offensiveness probability c in [0, 1].
double classifier_target(double score);

/// Signed distance to the closed ball of the given radius: ||z - center|| - radius.
double disk_target(const LatentPoint& z, const LatentPoint& center, double radius);

TargetFunction make_disk_target(LatentPoint center, double radius);

}  // namespace latent_reach
