#pragma once

#include <vector>

#include <Eigen/Dense>

#include "trtrom/mlqd.hpp"

namespace trtrom {

/// Grey T and E profiles over time, as stored in a fields CSV.
struct FieldHistory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> temperature;
  std::vector<Eigen::VectorXd> energy;

  static FieldHistory from(const RunRecord& record);
};

/// Relative 2-norm errors over cells of a run against a reference, per output
/// time. The time-integrated value is sum_n dt_n err_n over steps n >= 1.
struct ErrorReport {
  std::vector<double> times;
  std::vector<double> temperature;
  std::vector<double> energy;
  double max_temperature = 0.0;
  double max_energy = 0.0;
  double integrated_temperature = 0.0;
  double integrated_energy = 0.0;

  /// Error at the output time closest to t.
  double temperature_at(double t) const;
  double energy_at(double t) const;

 private:
  std::size_t nearest(double t) const;
};

ErrorReport compare_runs(const FieldHistory& run, const FieldHistory& reference);
ErrorReport compare_runs(const RunRecord& run, const RunRecord& reference);

}  // namespace trtrom
