#include "latent_reach/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace latent_reach {

double brute_force_value(const LatentSystem& system, const LatentPoint& z0, const TargetFunction& target,
                         std::size_t horizon) {
  if (z0.dim() != system.dim()) throw DimensionError("brute_force_value: start has wrong dimension");
  double best = target(z0);
  if (horizon == 0) return best;
  const LatentPoint zero = LatentPoint::zeros(system.dim());
  LatentPoint z = z0;
  for (std::size_t t = 0; t < horizon; ++t) {
    try {
      z = step(system, z, zero);
    } catch (const DimensionError&) {
      throw;
    } catch (const Error&) {
      throw Error("diverged");
    }
    best = std::min(best, target(z));
  }
  return best;
}

GridSpec GridSpec::uniform(std::size_t dim, double lo, double hi, std::size_t resolution) {
  return GridSpec{std::vector<double>(dim, lo), std::vector<double>(dim, hi), std::vector<std::size_t>(dim, resolution)};
}

std::size_t GridSpec::node_count() const {
  std::size_t n = 1;
  for (std::size_t r : resolution) n *= r;
  return n;
}

double GridSpec::coordinate(std::size_t axis, std::size_t index) const {
  if (resolution[axis] == 1) return lo[axis];
  return lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(index) / static_cast<double>(resolution[axis] - 1);
}

void GridSpec::validate() const {
  if (lo.empty() || lo.size() != hi.size() || lo.size() != resolution.size()) {
    throw DimensionError("grid bounds and resolution must share a positive dimension");
  }
  if (lo.size() > 3) throw DimensionError("grid oracle supports at most 3 dimensions");
  double cells = 1.0;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (resolution[a] == 0) throw Error("grid resolution must be positive");
    if (!(std::isfinite(lo[a]) && std::isfinite(hi[a]) && lo[a] <= hi[a])) throw Error("invalid grid bounds");
    cells *= static_cast<double>(resolution[a]);
  }
  if (cells > 1e7) throw Error("grid exceeds 1e7 nodes");
}

std::vector<std::size_t> Grid::unravel(std::size_t flat_index) const {
  std::vector<std::size_t> idx(spec.dim());
  for (std::size_t a = spec.dim(); a-- > 0;) {
    idx[a] = flat_index % spec.resolution[a];
    flat_index /= spec.resolution[a];
  }
  return idx;
}

LatentPoint Grid::node(std::size_t flat_index) const {
  const auto idx = unravel(flat_index);
  std::vector<double> c(idx.size());
  for (std::size_t a = 0; a < c.size(); ++a) c[a] = spec.coordinate(a, idx[a]);
  return LatentPoint(std::move(c));
}

Grid grid_brt(const LatentSystem& system, const TargetFunction& target, const GridSpec& spec, std::size_t horizon,
              Execution exec) {
  spec.validate();
  if (spec.dim() != system.dim()) throw DimensionError("grid and system dimensions differ");
  Grid grid{spec, std::vector<double>(spec.node_count())};
  for_each_index(exec, grid.values.size(), [&](std::size_t i) {
    grid.values[i] = brute_force_value(system, grid.node(i), target, horizon);
  });
  return grid;
}

GridValue::GridValue(Grid grid) : grid_(std::move(grid)) {
  grid_.spec.validate();
  if (grid_.values.size() != grid_.spec.node_count()) throw DimensionError("grid value count mismatch");
}

double GridValue::value(const LatentPoint& z) const {
  const GridSpec& s = grid_.spec;
  if (z.dim() != s.dim()) throw DimensionError("grid value: wrong dimension");
  const std::size_t d = s.dim();
  std::vector<std::size_t> base(d);
  std::vector<double> frac(d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    if (s.resolution[a] == 1) continue;
    const double step = (s.hi[a] - s.lo[a]) / static_cast<double>(s.resolution[a] - 1);
    double pos = step > 0.0 ? (z[a] - s.lo[a]) / step : 0.0;
    pos = std::clamp(pos, 0.0, static_cast<double>(s.resolution[a] - 1));
    base[a] = std::min(static_cast<std::size_t>(pos), s.resolution[a] - 2);
    frac[a] = pos - static_cast<double>(base[a]);
  }
  double out = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool upper = (corner >> a) & 1;
      if (s.resolution[a] == 1 && upper) {
        w = 0.0;
        break;
      }
      w *= upper ? frac[a] : 1.0 - frac[a];
      flat = flat * s.resolution[a] + base[a] + (upper ? 1 : 0);
    }
    if (w != 0.0) out += w * grid_.values[flat];
  }
  return out;
}

std::vector<LatentPoint> dense_ball_points(std::size_t dim, double radius, std::size_t count) {
  if (dim < 1 || dim > 3) throw DimensionError("dense ball cover supports dimensions 1 to 3");
  if (!(radius > 0.0)) throw Error("ball radius must be positive");
  std::vector<LatentPoint> pts;
  pts.reserve(count);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (dim == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      const double x = count == 1 ? 0.0 : -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(count - 1);
      pts.push_back(LatentPoint{x});
    }
    return pts;
  }
  // generalized golden ratios: phi_2 solves x^3 = x + 1, phi_3 solves x^4 = x + 1
  const double phi = dim == 2 ? std::numbers::phi : 1.324717957244746;
  const double a1 = 1.0 / phi, a2 = 1.0 / (phi * phi);
  for (std::size_t i = 0; i < count; ++i) {
    const double u0 = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    const double r = radius * std::pow(u0, 1.0 / static_cast<double>(dim));
    const double u1 = std::fmod(0.5 + a1 * static_cast<double>(i), 1.0);
    if (dim == 2) {
      pts.push_back(LatentPoint{r * std::cos(kTwoPi * u1), r * std::sin(kTwoPi * u1)});
    } else {
      const double u2 = std::fmod(0.5 + a2 * static_cast<double>(i), 1.0);
      const double cz = 1.0 - 2.0 * u1;
      const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
      pts.push_back(LatentPoint{r * sz * std::cos(kTwoPi * u2), r * sz * std::sin(kTwoPi * u2), r * cz});
    }
  }
  return pts;
}

LatentPoint exhaustive_lrf(const ValueFunction& value, const LatentPoint& z, double radius, std::size_t count,
                           Execution exec) {
  if (z.dim() != value.dim()) throw DimensionError("exhaustive_lrf: state and value dims differ");
  std::vector<LatentPoint> cands;
  cands.reserve(count + 1);
  cands.push_back(LatentPoint::zeros(z.dim()));
  for (auto& p : dense_ball_points(z.dim(), radius, count)) cands.push_back(std::move(p));
  std::vector<double> scores(cands.size());
  for_each_index(exec, cands.size(), [&](std::size_t i) { scores[i] = value(z + cands[i]); });
  const auto best = std::max_element(scores.begin(), scores.end());
  return cands[static_cast<std::size_t>(best - scores.begin())];
}

}  // namespace latent_reach
