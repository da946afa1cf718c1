#pragma once

#include <vector>

#include "trtrom/mlqd.hpp"
#include "trtrom/pod.hpp"

namespace trtrom {

/// Isotropic Planckian intensity at the uniform initial temperature.
IntensityField initial_intensity(const Problem& problem);

/// Intensity model of the full-order method: one SCB sweep per outer iteration.
class TransportModel final : public IntensityModel {
 public:
  TransportModel(const Problem& problem, const ScbTransport& transport);

  const IntensityField& solve(const GroupCoefficients& material, double dt, StepDiagnostics& diag) override;
  void end_step(std::size_t step) override;

  const IntensityField& previous() const { return previous_; }

 private:
  const Problem& problem_;
  const ScbTransport& transport_;
  IntensityField previous_;
  IntensityField current_;
};

struct FomResult {
  RunRecord record;
  std::vector<SnapshotDatabase> databases;  // one per stage, in stage order
};

/// Full-order run collecting the converged end-of-step intensities into one
/// snapshot database per stage. Stages without steps get no database.
FomResult run_fom(const Problem& problem);

}  // namespace trtrom
