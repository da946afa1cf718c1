#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "trtrom/discretization.hpp"
#include "trtrom/loqd.hpp"
#include "trtrom/moments.hpp"
#include "trtrom/physics.hpp"
#include "trtrom/transport.hpp"

namespace trtrom {

struct SolverSettings {
  double eps_temperature = 1e-12;
  double eps_energy = 1e-12;
  std::size_t max_outer = 200;
  std::size_t max_inner = 500;
};

/// Everything that defines a TRT problem on a given phase-space grid.
struct Problem {
  Material material;
  SpatialMesh mesh;
  AngularQuadrature quadrature;
  TimeGrid time;
  BoundarySpec boundary;
  double initial_temperature;
  SolverSettings settings;

  ScbTransport transport() const;
  PhaseSpaceLayout layout() const;
};

struct StepDiagnostics {
  std::size_t step = 0;
  double time = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  double energy_balance = 0.0;  // radiation + material + leakage closure
  std::size_t negative_intensities = 0;
  std::size_t closure_violations = 0;
  std::size_t rank = 0;
  double reduced_rcond = std::numeric_limits<double>::quiet_NaN();
  double transition_residual = std::numeric_limits<double>::quiet_NaN();
};

struct MlqdState {
  GreyState grey;
  MultigroupState multigroup;
};

/// Chronological solution history; index 0 is the initial condition.
struct RunRecord {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> temperature;
  std::vector<Eigen::VectorXd> energy;
  std::vector<Eigen::MatrixXd> group_energy;
  std::vector<Eigen::MatrixXd> group_flux;
  std::vector<StepDiagnostics> steps;
  double wall_seconds = 0.0;

  void append(double t, const MlqdState& state);
};

/// The high-order part of one outer iteration: produces the intensity the
/// Eddington and boundary factors are computed from.
class IntensityModel {
 public:
  virtual ~IntensityModel() = default;
  virtual void begin_step(std::size_t /*step*/, StepDiagnostics& /*diag*/) {}
  virtual const IntensityField& solve(const GroupCoefficients& material, double dt, StepDiagnostics& diag) = 0;
  /// Commits the latest iterate as the previous-time-level intensity.
  virtual void end_step(std::size_t step) = 0;
};

/// Face law of the first-moment equations. The default is the transient
/// quasidiffusion face relation with arithmetic-mean face opacities.
class FaceLaw {
 public:
  virtual ~FaceLaw() = default;
  virtual bool transient() const { return true; }
  virtual Eigen::MatrixXd face_opacity(const GroupCoefficients& material, const MultigroupState& /*latest*/) const {
    return face_opacities(material.opacity);
  }
};

/// Multilevel quasidiffusion time stepper: an outer loop over the high-order
/// intensity solve and an inner loop over multigroup LOQD, grey LOQD and the
/// material energy balance. Both loops stop when the relative 2-norm changes
/// of T and E fall below the configured tolerances.
class MlqdSolver {
 public:
  MlqdSolver(const Problem& problem, IntensityModel* model, const FaceLaw* law = nullptr);

  MlqdState initial_state() const;
  /// Advances `state` from step n-1 to step n (1-based).
  StepDiagnostics advance(MlqdState& state, std::size_t n);

  /// Moment ladder with a fixed closure; updates `current` in place and
  /// returns the number of inner iterations.
  std::size_t solve_ladder(const LoqdClosure& closure, const MlqdState& previous, MlqdState& current, double dt) const;

  using StepCallback = std::function<void(std::size_t step, const MlqdState& state)>;
  RunRecord run(const StepCallback& on_step = {});

  const Problem& problem() const { return problem_; }
  const ScbTransport& transport() const { return transport_; }
  const LoqdSolver& loqd() const { return loqd_; }
  const BoundaryInflow& inflow() const { return inflow_; }

 private:
  const Problem& problem_;
  IntensityModel* model_;
  const FaceLaw* law_;
  FaceLaw default_law_;
  ScbTransport transport_;
  LoqdSolver loqd_;
  BoundaryInflow inflow_;
};

/// Relative 2-norm error ||a - b|| / ||b||.
double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& reference);

}  // namespace trtrom
