#include "latent_reach/monitor.hpp"

namespace latent_reach {

MonitorReport monitor_values(std::vector<double> values, double threshold) {
  MonitorReport report;
  report.threshold = threshold;
  report.values = std::move(values);
  for (std::size_t t = 0; t < report.values.size(); ++t) {
    if (report.values[t] <= threshold) {
      report.flagged = true;
      report.first_flag_index = t;
      break;
    }
  }
  return report;
}

MonitorReport monitor_trajectory(const ValueFunction& value, const Trajectory& traj, double threshold) {
  traj.validate();
  if (traj.dim() != value.dim()) {
    throw DimensionError("monitor: trajectory dim " + std::to_string(traj.dim()) + " vs value dim " +
                         std::to_string(value.dim()));
  }
  std::vector<double> values(traj.states.size());
  for (std::size_t t = 0; t < values.size(); ++t) values[t] = value(traj.states[t]);
  return monitor_values(std::move(values), threshold);
}

std::optional<double> first_token_index_stat(std::span<const MonitorReport> reports, const std::vector<bool>& truths) {
  if (reports.size() != truths.size()) throw Error("reports and truths differ in length");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].flagged && truths[i]) {
      sum += static_cast<double>(*reports[i].first_flag_index);
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace latent_reach
