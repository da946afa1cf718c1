#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "trtrom/transport.hpp"

namespace trtrom {

enum class Side { kLeft = 0, kRight = 1 };

/// Angular moments of a discrete intensity and the closures derived from it.
struct MomentFields {
  Eigen::MatrixXd energy;              // E_g per cell, Ng x Nx
  Eigen::MatrixXd flux;                // F_g per face, Ng x (Nx + 1)
  Eigen::MatrixXd eddington;           // f_g per cell, Ng x Nx
  Eigen::MatrixXd boundary_eddington;  // f_g on the two boundary faces, Ng x 2
  Eigen::MatrixXd boundary_factor;     // C_g = F_g / (c E_g) on boundary faces, Ng x 2
  Eigen::MatrixXd outgoing_factor;     // F_out / (c E_out) of the outgoing half-range, Ng x 2
  std::size_t closure_violations = 0;  // entries outside the physical range (clamped)
};

/// Half-range incoming energy density and flux at the two boundaries.
struct BoundaryInflow {
  Eigen::MatrixXd energy;  // Ng x 2
  Eigen::MatrixXd flux;    // Ng x 2 (signed, positive towards +x)

  static BoundaryInflow from(const ScbTransport& transport, const BoundarySpec& bc);
  double grey_energy(Side side) const { return energy.col(static_cast<Eigen::Index>(side)).sum(); }
  double grey_flux(Side side) const { return flux.col(static_cast<Eigen::Index>(side)).sum(); }
};

/// E_g (cell, corner-averaged) and F_g (face, upwinded edge values).
void compute_group_moments(const ScbTransport& transport, const IntensityField& intensity,
                           const BoundarySpec& bc, MomentFields& out);

/// f_g per cell. Degenerate denominators give 1/3; ratios outside
/// [min mu^2, max mu^2] are clamped and counted in `violations`.
Eigen::MatrixXd eddington_factor(const ScbTransport& transport, const IntensityField& intensity,
                                 std::size_t* violations = nullptr);

/// C_g = F_g^b / (c E_g^b) on one boundary face; +-1/2 when E_g^b = 0.
Eigen::VectorXd boundary_factor(const ScbTransport& transport, const IntensityField& intensity,
                                const BoundarySpec& bc, Side side);

/// Every moment and closure in one pass.
MomentFields compute_moments(const ScbTransport& transport, const IntensityField& intensity, const BoundarySpec& bc);

/// Grey (spectrum-averaged) coefficients. Cell quantities: kappa_E, kappa_B, f.
/// Face quantities: kappa_R, eta, using the face opacities the multigroup
/// first-moment equations were assembled with.
struct GreyCoefficients {
  Eigen::VectorXd kappa_e;    // Nx
  Eigen::VectorXd kappa_b;    // Nx
  Eigen::VectorXd eddington;  // Nx
  Eigen::VectorXd kappa_r;    // Nx + 1
  Eigen::VectorXd eta;        // Nx + 1
  Eigen::Vector2d boundary_eddington{1.0 / 3.0, 1.0 / 3.0};
  Eigen::Vector2d outgoing_factor{-0.5, 0.5};
};

/// The five grey formulas evaluated cell by cell from group data.
/// `energy`, `eddington`, `opacity`, `planck`: Ng x Nx. `flux`, `face_opacity`:
/// Ng x (Nx + 1). The energy used for eta on a face is the mean of the two
/// adjacent cells (the adjacent cell on a boundary face).
GreyCoefficients grey_coefficients(const Eigen::MatrixXd& energy, const Eigen::MatrixXd& flux,
                                   const Eigen::MatrixXd& eddington, const Eigen::MatrixXd& opacity,
                                   const Eigen::MatrixXd& planck, const Eigen::MatrixXd& face_opacity);

}  // namespace trtrom
