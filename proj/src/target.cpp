#include "latent_reach/target.hpp"

#include <cmath>

namespace latent_reach {

double classifier_target(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw Error("invalid probability");
  return 0.5 - score;
}

double disk_target(const LatentPoint& z, const LatentPoint& center, double radius) {
  require_same_dim(z, center, "disk target");
  if (!(radius > 0.0)) throw Error("disk radius must be positive");
  return (z - center).norm() - radius;
}

TargetFunction make_disk_target(LatentPoint center, double radius) {
  if (!(radius > 0.0)) throw Error("disk radius must be positive");
  return TargetFunction{"disk", [center = std::move(center), radius](const LatentPoint& z) {
                          return disk_target(z, center, radius);
                        }};
}

}  // namespace latent_reach
