#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "trtrom/discretization.hpp"
#include "trtrom/physics.hpp"

namespace trtrom {

/// 64-bit FNV-1a hash of the phase-space grid: Nx, Nmu, Ng, corner count,
/// cell widths, angular nodes and weights, and group boundaries.
std::uint64_t grid_fingerprint(const SpatialMesh& mesh, const AngularQuadrature& quad, const GroupStructure& groups);

/// Diagonal weight of the SCB inner product: w_m h_i / 2 on every corner.
class WeightOperator {
 public:
  WeightOperator(const SpatialMesh& mesh, const AngularQuadrature& quad, std::size_t groups);

  const Eigen::VectorXd& diagonal() const { return diag_; }
  const Eigen::VectorXd& sqrt_diagonal() const { return sqrt_; }
  Eigen::Index size() const { return diag_.size(); }

  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  double norm(const Eigen::VectorXd& a) const { return std::sqrt(inner(a, a)); }

 private:
  Eigen::VectorXd diag_;
  Eigen::VectorXd sqrt_;
};

/// Snapshot matrix A = [I^1 ... I^N] of one stage with its step sizes.
struct SnapshotDatabase {
  Eigen::MatrixXd snapshots;  // D x N
  Eigen::VectorXd dt;         // N
  std::size_t stage = 0;
  std::uint64_t fingerprint = 0;
  std::size_t cells = 0;
  std::size_t angles = 0;
  std::size_t groups = 0;

  std::size_t columns() const { return static_cast<std::size_t>(snapshots.cols()); }
};

/// W-orthonormal basis U = W^{-1/2} U_hat with singular values in
/// nonincreasing order.
struct PodBasis {
  Eigen::MatrixXd vectors;          // D x d
  Eigen::VectorXd singular_values;  // d
  std::size_t stage = 0;
  std::uint64_t fingerprint = 0;
  std::size_t cells = 0;
  std::size_t angles = 0;
  std::size_t groups = 0;

  std::size_t rank() const { return static_cast<std::size_t>(vectors.cols()); }
};

struct PodOptions {
  /// Singular values at or below tolerance * sigma_1 are dropped. A negative
  /// value selects max(D, N) * machine epsilon.
  double rank_tolerance = -1.0;
};

/// Thin SVD of W^{1/2} A D^{1/2} (Householder QR followed by one-sided
/// Jacobi on the triangular factor).
PodBasis compute_pod_basis(const SnapshotDatabase& db, const WeightOperator& w, const PodOptions& options = {});

/// All singular values of W^{1/2} A D^{1/2}, including those below the
/// numerical-rank threshold.
Eigen::VectorXd weighted_singular_values(const SnapshotDatabase& db, const WeightOperator& w);

/// Smallest r >= 1 with sqrt(sum_{l>r} s_l^2 / sum_l s_l^2) < eps.
std::size_t select_rank(const Eigen::VectorXd& singular_values, double eps);

/// sqrt(sum_{l>r} s_l^2 / sum_l s_l^2).
double tail_ratio(const Eigen::VectorXd& singular_values, std::size_t r);

/// lambda_l = <I, u_l>_W for l < r.
Eigen::VectorXd project(const Eigen::VectorXd& intensity, const PodBasis& basis, std::size_t r, const WeightOperator& w);
Eigen::VectorXd reconstruct(const Eigen::VectorXd& coefficients, const PodBasis& basis);

}  // namespace trtrom
