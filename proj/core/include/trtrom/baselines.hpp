#pragma once

#include <string>

#include "trtrom/mlqd.hpp"

namespace trtrom {

enum class BaselineKind { kP1, kFld };

BaselineKind parse_baseline_kind(const std::string& name);
std::string to_string(BaselineKind kind);

/// Closure of the P1 model: f = 1/3, Marshak boundary factors.
LoqdClosure p1_closure(std::size_t groups, std::size_t cells);

/// Flux-limited diffusion face law F = -c Lambda grad E / kappa with
/// Lambda = 1 / sqrt(9 + R^2), R = |grad E| / (kappa E). The limiter is
/// evaluated from the latest multigroup iterate and the flux has no time
/// derivative. Pairs with a closure of f = 1.
class FluxLimitedLaw final : public FaceLaw {
 public:
  explicit FluxLimitedLaw(const SpatialMesh& mesh) : mesh_(mesh) {}

  bool transient() const override { return false; }
  Eigen::MatrixXd face_opacity(const GroupCoefficients& material, const MultigroupState& latest) const override;

  /// Lambda per (group, face) for the given energies and face opacities.
  Eigen::MatrixXd limiter(const MultigroupState& latest, const Eigen::MatrixXd& face_kappa) const;

 private:
  SpatialMesh mesh_;
};

LoqdClosure fld_closure(std::size_t groups, std::size_t cells);

/// Runs the moment ladder with a fixed closure and no transport solve. The
/// flux-limited run raises the inner iteration cap to at least 5000.
RunRecord run_baseline(const Problem& problem, BaselineKind kind);

}  // namespace trtrom
