#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "trtrom/mlqd.hpp"
#include "trtrom/pod.hpp"

namespace trtrom {

/// Galerkin projections of the SCB operators onto the first r basis vectors.
/// The opacity-dependent part is kept as packed per-(cell, group) Gram
/// blocks so that <u_l, K(T) u_l'>_W costs r^2 Nx Ng per evaluation.
class ReducedOperators {
 public:
  ReducedOperators(const ScbTransport& transport, const PodBasis& basis, std::size_t rank, const WeightOperator& w,
                   const BoundarySpec& bc);

  std::size_t rank() const { return r_; }
  const Eigen::MatrixXd& streaming() const { return streaming_; }
  /// Column (i * Ng + g) holds the packed upper triangle of G[i,g].
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// emission()(l, i * Ng + g) = sum over angles and corners of W u_l.
  const Eigen::MatrixXd& emission() const { return emission_; }
  const Eigen::VectorXd& inflow() const { return inflow_; }

  /// <u_l, K u_l'>_W for an Ng x Nx opacity table.
  Eigen::MatrixXd removal(const Eigen::MatrixXd& opacity) const;
  /// <u_l, Q>_W for the isotropic emission 2 pi kappa B plus boundary inflow.
  Eigen::VectorXd source(const GroupCoefficients& material) const;
  /// Unpacks Gram block G[i,g].
  Eigen::MatrixXd gram_block(std::size_t cell, std::size_t group) const;

 private:
  Eigen::MatrixXd unpack(const Eigen::VectorXd& packed) const;

  std::size_t r_;
  std::size_t nx_;
  std::size_t ng_;
  Eigen::MatrixXd streaming_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd emission_;
  Eigen::VectorXd inflow_;
};

struct ReducedSolution {
  Eigen::VectorXd coefficients;
  double rcond = 0.0;
};

/// Solves [(1/(c dt)) I + M_L + M_K(T)] lambda = lambda_prev/(c dt) + q(T).
ReducedSolution solve_reduced_step(const ReducedOperators& ops, const Eigen::VectorXd& previous,
                                   const GroupCoefficients& material, double dt, double light_speed);

/// Reconstructs with the old basis and projects onto the first r_new vectors
/// of the new one. `residual` receives ||I - P I||_W / ||I||_W.
Eigen::VectorXd stage_transition(const Eigen::VectorXd& coefficients, const PodBasis& from, const PodBasis& to,
                                 std::size_t r_new, const WeightOperator& w, double* residual = nullptr);

/// Per-stage ranks from the rank criterion applied to each basis.
std::vector<std::size_t> ranks_for_eps(const std::vector<PodBasis>& bases, double eps);

/// Intensity model of the reduced method: an r x r Galerkin solve followed
/// by reconstruction. Bases switch at stage boundaries.
class PodGalerkinModel final : public IntensityModel {
 public:
  PodGalerkinModel(const Problem& problem, const ScbTransport& transport, const std::vector<PodBasis>& bases,
                   std::vector<std::size_t> ranks);

  void begin_step(std::size_t step, StepDiagnostics& diag) override;
  const IntensityField& solve(const GroupCoefficients& material, double dt, StepDiagnostics& diag) override;
  void end_step(std::size_t step) override;

  const Eigen::VectorXd& coefficients() const { return previous_; }
  std::size_t active_stage() const { return stage_; }
  const ReducedOperators& operators() const { return *ops_; }

 private:
  void activate(std::size_t stage);

  const Problem& problem_;
  const ScbTransport& transport_;
  const std::vector<PodBasis>& bases_;
  std::vector<std::size_t> ranks_;
  WeightOperator weight_;
  std::size_t stage_ = 0;
  std::unique_ptr<ReducedOperators> ops_;
  Eigen::VectorXd previous_;
  Eigen::VectorXd current_;
  IntensityField intensity_;
};

/// Reduced-order run with explicit per-stage ranks.
RunRecord run_rom(const Problem& problem, const std::vector<PodBasis>& bases, const std::vector<std::size_t>& ranks);

/// Checks that the bases match the problem grid and cover every stage.
void check_bases(const Problem& problem, const std::vector<PodBasis>& bases);

}  // namespace trtrom
