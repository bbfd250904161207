#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace latent_reach {

/// Domain failure: invalid input, violated invariant, numerical breakdown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A point in the d-dimensional latent space. Coordinates are always finite.
class LatentPoint {
 public:
  LatentPoint() = default;
  explicit LatentPoint(std::vector<double> coords);
  LatentPoint(std::initializer_list<double> coords);

  static LatentPoint zeros(std::size_t dim);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }

  double norm() const;

  friend LatentPoint operator+(const LatentPoint& a, const LatentPoint& b);
  friend LatentPoint operator-(const LatentPoint& a, const LatentPoint& b);
  friend bool operator==(const LatentPoint&, const LatentPoint&) = default;

 private:
  std::vector<double> coords_;
};

void require_same_dim(const LatentPoint& a, const LatentPoint& b, const char* what);

struct Trajectory {
  std::vector<LatentPoint> states;  // z_0 .. z_T, z_0 is the prompt state
  std::vector<double> ell;          // target value at each state
  std::optional<std::vector<std::string>> tokens;
  std::optional<LatentPoint> prompt_embedding;
  std::optional<LatentPoint> response_embedding;

  std::size_t horizon() const { return states.size() - 1; }
  std::size_t dim() const { return states.front().dim(); }

  /// Throws Error if states/ell are empty, lengths differ, dims disagree
  /// or any label is non-finite.
  void validate() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct DatasetHeader {
  std::size_t dim = 0;
  std::string source;
  long layer_index = 0;
  std::string target_name;
  std::string pooling = "mean";

  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct TrajectoryDataset {
  DatasetHeader header;
  std::vector<Trajectory> trajectories;

  void validate() const;

  friend bool operator==(const TrajectoryDataset&, const TrajectoryDataset&) = default;
};

struct SafetyLabelConfig {
  double unsafe_threshold = 0.0;
};

/// out[t] = min over tau in [t, T] of ell[tau].
std::vector<double> running_min_labels(std::span<const double> ell);

/// Backward Bellman recursion with discount gamma:
///   out[T] = ell[T]
///   out[t] = (1 - gamma) ell[t] + gamma min(ell[t], out[t+1])
/// gamma == 1 reproduces running_min_labels exactly.
std::vector<double> discounted_min_targets(std::span<const double> ell, double gamma);

/// Broadcast of the terminal label ell[T].
std::vector<double> terminal_targets(std::span<const double> ell);

/// Failure set is closed: ell(z_T) <= threshold counts as unsafe.
bool trajectory_is_unsafe(const Trajectory& traj, const SafetyLabelConfig& cfg = {});

}  // namespace latent_reach
