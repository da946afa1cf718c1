#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "trtrom/discretization.hpp"
#include "trtrom/physics.hpp"

namespace trtrom {

/// Flat intensity vector laid out by PhaseSpaceLayout (length D = 2 Nx Nmu Ng).
using IntensityField = Eigen::VectorXd;

/// Incoming intensity per (group, angle) at x = 0 (used for mu > 0) and at
/// x = X (used for mu < 0). Entries for outgoing directions are ignored.
struct BoundarySpec {
  Eigen::MatrixXd left;   // Ng x Nmu
  Eigen::MatrixXd right;  // Ng x Nmu

  static BoundarySpec vacuum(std::size_t groups, std::size_t angles);
  /// Isotropic black-body inflow 2 pi B_g(T) on the left, vacuum on the right.
  static BoundarySpec planckian_left(const Material& material, std::size_t angles, double temperature);
};

/// Isotropic equilibrium field I = 2 pi B_g(T_i) on every corner and direction.
IntensityField equilibrium_intensity(const PhaseSpaceLayout& layout, const Eigen::MatrixXd& planck);

/// Simple corner balance in slab geometry with discrete ordinates and
/// backward Euler. Each corner equation is normalized by the half-cell volume:
///
///   (I - I_prev)/(c dt) + L I + K I = Q
///
/// where L holds streaming with upwinded interior edges, K = kappa_g(T_i) is
/// diagonal and Q holds the isotropic emission 2 pi kappa B plus the boundary
/// inflow. The cell-midpoint intensity is the average of the two corners and
/// an edge takes the value of its upwind corner.
class ScbTransport {
 public:
  ScbTransport(SpatialMesh mesh, AngularQuadrature quadrature, std::size_t groups, double light_speed);

  const PhaseSpaceLayout& layout() const { return layout_; }
  const SpatialMesh& mesh() const { return mesh_; }
  const AngularQuadrature& quadrature() const { return quad_; }
  double light_speed() const { return c_; }

  /// Solves the discrete equation for one time step by one sweep per
  /// (group, direction). `negative_count`, when given, receives the number
  /// of negative entries in the result.
  IntensityField sweep(const GroupCoefficients& material, const IntensityField& previous, double dt,
                       const BoundarySpec& bc, std::size_t* negative_count = nullptr) const;

  IntensityField apply_streaming(const IntensityField& intensity) const;
  IntensityField apply_removal(const Eigen::MatrixXd& opacity, const IntensityField& intensity) const;
  /// Emission plus boundary inflow; excludes the I_prev/(c dt) term.
  IntensityField assemble_source(const GroupCoefficients& material, const BoundarySpec& bc) const;
  IntensityField assemble_inflow(const BoundarySpec& bc) const;

  /// Full residual (I - I_prev)/(c dt) + L I + K I - Q.
  IntensityField residual(const IntensityField& intensity, const IntensityField& previous,
                          const GroupCoefficients& material, double dt, const BoundarySpec& bc) const;

  /// Global energy bookkeeping |rate + leakage - (emission - absorption)|
  /// divided by the largest of those magnitudes.
  double energy_balance_residual(const IntensityField& intensity, const IntensityField& previous,
                                 const GroupCoefficients& material, double dt, const BoundarySpec& bc) const;

  /// Intensity on the cell edge `face` (0..Nx) in direction `angle`.
  double edge_intensity(const IntensityField& intensity, const BoundarySpec& bc, std::size_t face,
                        std::size_t angle, std::size_t group) const;

 private:
  void check_field(const IntensityField& v, const char* what) const;
  void check_material(const GroupCoefficients& material) const;

  SpatialMesh mesh_;
  AngularQuadrature quad_;
  PhaseSpaceLayout layout_;
  double c_;
};

}  // namespace trtrom
