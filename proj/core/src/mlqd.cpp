#include "trtrom/mlqd.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "trtrom/error.hpp"

namespace trtrom {

namespace {

bool converged(const Eigen::VectorXd& now, const Eigen::VectorXd& before, double eps) {
  return (now - before).norm() <= eps * now.norm();
}

}  // namespace

double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& reference) {
  if (a.size() != reference.size()) throw LayoutError("relative_error: fields have different lengths");
  const double ref = reference.norm();
  const double diff = (a - reference).norm();
  return ref > 0.0 ? diff / ref : diff;
}

void RunRecord::append(double t, const MlqdState& state) {
  times.push_back(t);
  temperature.push_back(state.grey.temperature);
  energy.push_back(state.grey.energy);
  group_energy.push_back(state.multigroup.energy);
  group_flux.push_back(state.multigroup.flux);
}

ScbTransport Problem::transport() const {
  return ScbTransport(mesh, quadrature, material.group_count(), material.constants().c);
}

PhaseSpaceLayout Problem::layout() const {
  return PhaseSpaceLayout(mesh.cells(), quadrature.size(), material.group_count());
}

MlqdSolver::MlqdSolver(const Problem& problem, IntensityModel* model, const FaceLaw* law)
    : problem_(problem),
      model_(model),
      law_(law != nullptr ? law : &default_law_),
      transport_(problem.transport()),
      loqd_(problem.mesh, problem.material.constants().c),
      inflow_(BoundaryInflow::from(transport_, problem.boundary)) {}

MlqdState MlqdSolver::initial_state() const {
  const auto nx = static_cast<Eigen::Index>(problem_.mesh.cells());
  const auto ng = static_cast<Eigen::Index>(problem_.material.group_count());
  const double c = problem_.material.constants().c;
  const Eigen::VectorXd b = problem_.material.planck_spectrum(problem_.initial_temperature);
  MlqdState s;
  s.multigroup.energy = (4.0 * std::numbers::pi / c * b).replicate(1, nx);
  s.multigroup.flux = Eigen::MatrixXd::Zero(ng, nx + 1);
  s.multigroup.boundary_energy = s.multigroup.energy.leftCols(1).replicate(1, 2);
  s.grey.energy = s.multigroup.energy.colwise().sum().transpose();
  s.grey.flux = Eigen::VectorXd::Zero(nx + 1);
  s.grey.temperature = Eigen::VectorXd::Constant(nx, problem_.initial_temperature);
  return s;
}

std::size_t MlqdSolver::solve_ladder(const LoqdClosure& closure, const MlqdState& previous, MlqdState& current,
                                     double dt) const {
  const auto& settings = problem_.settings;
  const Material& material = problem_.material;
  for (std::size_t s = 1; s <= settings.max_inner; ++s) {
    const GroupCoefficients coeffs = material.evaluate(current.grey.temperature);
    const Eigen::MatrixXd face_kappa = law_->face_opacity(coeffs, current.multigroup);
    MultigroupState mg = loqd_.solve_multigroup(closure, coeffs, face_kappa, previous.multigroup, inflow_, dt,
                                                law_->transient());
    const GreyCoefficients grey = loqd_.grey_closure(mg, closure, coeffs, face_kappa, inflow_);
    auto solved = loqd_.solve_grey_meb(grey, previous.grey, inflow_, dt, material.constants().a_rad, material.eos(),
                                       current.grey.temperature, law_->transient());
    const bool done = converged(solved.state.temperature, current.grey.temperature, settings.eps_temperature) &&
                      converged(solved.state.energy, current.grey.energy, settings.eps_energy);
    current.multigroup = std::move(mg);
    current.grey = std::move(solved.state);
    if (done) return s;
  }
  throw NumericalError("MLQD: moment ladder did not converge in " + std::to_string(settings.max_inner) +
                       " inner iterations");
}

StepDiagnostics MlqdSolver::advance(MlqdState& state, std::size_t n) {
  const auto& settings = problem_.settings;
  const double dt = problem_.time.dt(n);
  StepDiagnostics diag;
  diag.step = n;
  diag.time = problem_.time.time(n);
  model_->begin_step(n, diag);

  const MlqdState previous = state;
  MlqdState current = state;
  bool done = false;
  for (std::size_t k = 1; k <= settings.max_outer && !done; ++k) {
    const GroupCoefficients coeffs = problem_.material.evaluate(current.grey.temperature);
    const IntensityField& intensity = model_->solve(coeffs, dt, diag);
    const MomentFields moments = compute_moments(transport_, intensity, problem_.boundary);
    diag.closure_violations = moments.closure_violations;
    const LoqdClosure closure = LoqdClosure::from(moments);

    const Eigen::VectorXd t_before = current.grey.temperature;
    const Eigen::VectorXd e_before = current.grey.energy;
    diag.inner_iterations += solve_ladder(closure, previous, current, dt);
    diag.outer_iterations = k;
    done = converged(current.grey.temperature, t_before, settings.eps_temperature) &&
           converged(current.grey.energy, e_before, settings.eps_energy);
  }
  if (!done)
    throw NumericalError("MLQD: step " + std::to_string(n) + " did not converge in " +
                         std::to_string(settings.max_outer) + " outer iterations");
  diag.energy_balance = loqd_.energy_bookkeeping(previous.grey, current.grey, dt, problem_.material.eos());
  model_->end_step(n);
  state = std::move(current);
  return diag;
}

RunRecord MlqdSolver::run(const StepCallback& on_step) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  MlqdState state = initial_state();
  rec.append(0.0, state);
  for (std::size_t n = 1; n <= problem_.time.steps(); ++n) {
    rec.steps.push_back(advance(state, n));
    rec.append(problem_.time.time(n), state);
    if (on_step) on_step(n, state);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace trtrom
