#include "latent_reach/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace latent_reach {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(std::string("non-finite value in ") + what);
  }
}

void require_nonempty(std::span<const double> ell) {
  if (ell.empty()) throw Error("empty trajectory");
}

}  // namespace

LatentPoint::LatentPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DimensionError("latent point must have dimension > 0");
  require_finite(coords_, "latent point");
}

LatentPoint::LatentPoint(std::initializer_list<double> coords)
    : LatentPoint(std::vector<double>(coords)) {}

LatentPoint LatentPoint::zeros(std::size_t dim) { return LatentPoint(std::vector<double>(dim, 0.0)); }

double LatentPoint::norm() const {
  double s = 0.0;
  for (double x : coords_) s += x * x;
  return std::sqrt(s);
}

void require_same_dim(const LatentPoint& a, const LatentPoint& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

LatentPoint operator+(const LatentPoint& a, const LatentPoint& b) {
  require_same_dim(a, b, "latent addition");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coords_[i] + b.coords_[i];
  return LatentPoint(std::move(out));
}

LatentPoint operator-(const LatentPoint& a, const LatentPoint& b) {
  require_same_dim(a, b, "latent subtraction");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coords_[i] - b.coords_[i];
  return LatentPoint(std::move(out));
}

void Trajectory::validate() const {
  if (states.empty()) throw Error("empty trajectory");
  if (states.size() != ell.size()) {
    throw Error("trajectory has " + std::to_string(states.size()) + " states but " +
                std::to_string(ell.size()) + " labels");
  }
  const std::size_t d = states.front().dim();
  for (const auto& s : states) {
    if (s.dim() != d) throw DimensionError("trajectory states disagree on dimension");
  }
  require_finite(ell, "trajectory labels");
}

void TrajectoryDataset::validate() const {
  if (header.dim == 0) throw DimensionError("dataset dim must be positive");
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    t.validate();
    if (t.dim() != header.dim) {
      throw DimensionError("trajectory " + std::to_string(i) + " has dim " + std::to_string(t.dim()) +
                           ", header says " + std::to_string(header.dim));
    }
  }
}

std::vector<double> running_min_labels(std::span<const double> ell) {
  require_nonempty(ell);
  std::vector<double> out(ell.begin(), ell.end());
  for (std::size_t t = out.size() - 1; t-- > 0;) out[t] = std::min(out[t], out[t + 1]);
  return out;
}

std::vector<double> discounted_min_targets(std::span<const double> ell, double gamma) {
  require_nonempty(ell);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must lie in [0, 1]");
  std::vector<double> out(ell.size());
  out.back() = ell.back();
  for (std::size_t t = out.size() - 1; t-- > 0;) {
    out[t] = (1.0 - gamma) * ell[t] + gamma * std::min(ell[t], out[t + 1]);
  }
  return out;
}

std::vector<double> terminal_targets(std::span<const double> ell) {
  require_nonempty(ell);
  return std::vector<double>(ell.size(), ell.back());
}

bool trajectory_is_unsafe(const Trajectory& traj, const SafetyLabelConfig& cfg) {
  if (traj.ell.empty()) throw Error("empty trajectory");
  return traj.ell.back() <= cfg.unsafe_threshold;
}

}  // namespace latent_reach
