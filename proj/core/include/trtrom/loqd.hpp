#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "trtrom/discretization.hpp"
#include "trtrom/moments.hpp"
#include "trtrom/physics.hpp"

namespace trtrom {

/// Closure data the moment equations need from the high-order solution.
struct LoqdClosure {
  Eigen::MatrixXd eddington;           // Ng x Nx
  Eigen::MatrixXd boundary_eddington;  // Ng x 2
  Eigen::MatrixXd outgoing_factor;     // Ng x 2, negative on the left, positive on the right

  static LoqdClosure from(const MomentFields& moments);
  /// f = 1/3 everywhere with Marshak half-range factors -+1/2 (the P1 limit).
  static LoqdClosure diffusion(std::size_t groups, std::size_t cells);
};

struct MultigroupState {
  Eigen::MatrixXd energy;           // Ng x Nx
  Eigen::MatrixXd flux;             // Ng x (Nx + 1)
  Eigen::MatrixXd boundary_energy;  // Ng x 2
};

struct GreyState {
  Eigen::VectorXd energy;       // Nx
  Eigen::VectorXd flux;         // Nx + 1
  Eigen::VectorXd temperature;  // Nx
};

/// Simple mean of adjacent cell opacities on interior faces, the adjacent
/// cell value on boundary faces. Ng x (Nx + 1).
Eigen::MatrixXd face_opacities(const Eigen::MatrixXd& cell_opacity);

/// Backward-Euler finite-volume low-order quasidiffusion solver.
///
/// Cell-centered E, face-centered F. On each cell:
///   (E - E_prev)/dt + (F_{i+1/2} - F_{i-1/2})/h_i + c kappa E = S
/// On each interior face:
///   tau (F - F_prev)/(c dt) + c (f_{i+1} E_{i+1} - f_i E_i)/d + k F [+ eta E_face] = 0
/// Boundary faces use the half-cell version of the face equation with the
/// boundary value eliminated through F_b = F_in + c C_out (E_b - E_in).
/// tau = 0 drops the flux time derivative (quasi-static flux laws).
class LoqdSolver {
 public:
  LoqdSolver(SpatialMesh mesh, double light_speed);

  const SpatialMesh& mesh() const { return mesh_; }
  double light_speed() const { return c_; }

  MultigroupState solve_multigroup(const LoqdClosure& closure, const GroupCoefficients& material,
                                   const Eigen::MatrixXd& face_opacity, const MultigroupState& previous,
                                   const BoundaryInflow& inflow, double dt, bool transient = true) const;

  /// Grey coefficients of a multigroup solution, including the grey boundary
  /// Eddington factors and half-range factors.
  GreyCoefficients grey_closure(const MultigroupState& solution, const LoqdClosure& closure,
                                const GroupCoefficients& material, const Eigen::MatrixXd& face_opacity,
                                const BoundaryInflow& inflow) const;

  /// Grey system with a prescribed emission c kappa_B a T^4 per cell (no MEB).
  GreyState solve_grey_fixed_emission(const GreyCoefficients& grey, const GreyState& previous,
                                      const Eigen::VectorXd& emission, const BoundaryInflow& inflow, double dt,
                                      bool transient = true) const;

  struct GreyMebResult {
    GreyState state;
    std::size_t iterations = 0;
  };

  /// Grey moment equations coupled to the grey material energy balance
  ///   (eps(T) - eps(T_prev))/dt = c (kappa_E E - kappa_B a T^4).
  GreyMebResult solve_grey_meb(const GreyCoefficients& grey, const GreyState& previous, const BoundaryInflow& inflow,
                               double dt, double a_rad, const MaterialEos& eos,
                               const Eigen::VectorXd& temperature_guess, bool transient = true) const;

  /// max_i |MEB residual_i| / max_i |c_v T_i / dt|.
  double meb_residual(const GreyCoefficients& grey, const GreyState& previous, const GreyState& state, double dt,
                      double a_rad, const MaterialEos& eos) const;

  /// Relative closure of radiation + material + boundary leakage energy over
  /// one step: |dE_rad + dE_mat + dt (F_right - F_left)| / (sum of magnitudes).
  double energy_bookkeeping(const GreyState& previous, const GreyState& state, double dt,
                            const MaterialEos& eos) const;

 private:
  struct FaceRelations;
  struct SweepInput;
  void solve_one(const SweepInput& in, Eigen::Ref<Eigen::VectorXd> energy, Eigen::Ref<Eigen::VectorXd> flux,
                 double& left_energy, double& right_energy) const;

  SpatialMesh mesh_;
  double c_;
};

/// Root of c_v (T - T_prev)/dt + c kappa_B a T^4 - c kappa_E E = 0.
double solve_meb_temperature(double t_prev, double dt, double cv, double c, double kappa_b, double kappa_e,
                             double energy, double a_rad);

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& upper, const Eigen::VectorXd& rhs);

}  // namespace trtrom
