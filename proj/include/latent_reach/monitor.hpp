#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "latent_reach/core.hpp"
#include "latent_reach/value.hpp"

namespace latent_reach {

struct MonitorReport {
  std::vector<double> values;  // V(z_0) .. V(z_T)
  bool flagged = false;
  std::optional<std::size_t> first_flag_index;
  double threshold = 0.0;
};

/// Evaluates V at every state and flags the first t with V(z_t) <= threshold.
MonitorReport monitor_trajectory(const ValueFunction& value, const Trajectory& traj, double threshold = 0.0);

/// Same flagging rule applied to precomputed values.
MonitorReport monitor_values(std::vector<double> values, double threshold = 0.0);

/// Mean first_flag_index over true positives (flagged and truly unsafe).
/// nullopt when there are none.
std::optional<double> first_token_index_stat(std::span<const MonitorReport> reports, const std::vector<bool>& truths);

}  // namespace latent_reach
