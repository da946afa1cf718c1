#include "trtrom/loqd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "trtrom/error.hpp"

namespace trtrom {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kGreyTolerance = 1e-13;
constexpr std::size_t kGreyMaxIterations = 50;

double relative_change(const Eigen::VectorXd& now, const Eigen::VectorXd& before) {
  const double scale = now.norm();
  const double diff = (now - before).norm();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

LoqdClosure LoqdClosure::from(const MomentFields& moments) {
  return LoqdClosure{moments.eddington, moments.boundary_eddington, moments.outgoing_factor};
}

LoqdClosure LoqdClosure::diffusion(std::size_t groups, std::size_t cells) {
  const auto ng = static_cast<Eigen::Index>(groups);
  LoqdClosure c;
  c.eddington = Eigen::MatrixXd::Constant(ng, static_cast<Eigen::Index>(cells), 1.0 / 3.0);
  c.boundary_eddington = Eigen::MatrixXd::Constant(ng, 2, 1.0 / 3.0);
  c.outgoing_factor.resize(ng, 2);
  c.outgoing_factor.col(0).setConstant(-0.5);
  c.outgoing_factor.col(1).setConstant(0.5);
  return c;
}

Eigen::MatrixXd face_opacities(const Eigen::MatrixXd& cell_opacity) {
  const Eigen::Index nx = cell_opacity.cols();
  Eigen::MatrixXd out(cell_opacity.rows(), nx + 1);
  out.col(0) = cell_opacity.col(0);
  out.col(nx) = cell_opacity.col(nx - 1);
  for (Eigen::Index f = 1; f < nx; ++f) out.col(f) = 0.5 * (cell_opacity.col(f - 1) + cell_opacity.col(f));
  return out;
}

Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& upper, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd c_prime(n);
  Eigen::VectorXd d_prime(n);
  double pivot = diag[0];
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) pivot = diag[i] - lower[i] * c_prime[i - 1];
    if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot))
      throw NumericalError("solve_tridiagonal: zero or non-finite pivot in row " + std::to_string(i));
    c_prime[i] = i + 1 < n ? upper[i] / pivot : 0.0;
    d_prime[i] = (rhs[i] - (i > 0 ? lower[i] * d_prime[i - 1] : 0.0)) / pivot;
  }
  Eigen::VectorXd x(n);
  x[n - 1] = d_prime[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d_prime[i] - c_prime[i] * x[i + 1];
  return x;
}

double solve_meb_temperature(double t_prev, double dt, double cv, double c, double kappa_b, double kappa_e,
                             double energy, double a_rad) {
  const double lin = cv / dt;
  const double quart = c * kappa_b * a_rad;
  const double absorbed = c * kappa_e * energy;
  auto g = [&](double t) { return lin * (t - t_prev) + quart * t * t * t * t - absorbed; };
  if (g(0.0) > 0.0)
    throw NumericalError("solve_meb_temperature: no nonnegative temperature balances the absorbed energy");
  // g is convex and increasing on T >= 0; Newton from a point with g >= 0
  // decreases monotonically to the root.
  const double t_eq = quart > 0.0 && absorbed > 0.0 ? std::pow(absorbed / quart, 0.25) : 0.0;
  const double t_lin = absorbed > 0.0 ? t_prev + absorbed / lin : t_prev;
  double t = std::max({t_prev, t_eq, quart > 0.0 ? 0.0 : t_lin});
  if (g(t) < 0.0) t = std::max(t, t_lin);
  const double t_max = t;
  for (std::size_t it = 0; it < 50; ++it) {
    const double dg = lin + 4.0 * quart * t * t * t;
    const double step = g(t) / dg;
    const double next = t - step;
    if (next < 0.0) break;
    t = next;
    if (std::abs(step) <= 1e-15 * t) return t;
  }
  // Bisection fallback on [0, t_max].
  double lo = 0.0;
  double hi = t_max;
  if (g(hi) < 0.0) throw NumericalError("solve_meb_temperature: failed to bracket the material temperature");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

struct LoqdSolver::SweepInput {
  Eigen::VectorXd eddington;  // Nx
  double boundary_eddington[2];
  double outgoing[2];
  Eigen::VectorXd face_kappa;  // Nx + 1
  Eigen::VectorXd eta;         // Nx + 1
  Eigen::VectorXd flux_prev;   // Nx + 1
  Eigen::VectorXd energy_prev;
  Eigen::VectorXd absorb;  // coefficient of E in the cell balance (c kappa)
  Eigen::VectorXd source;
  double inflow_energy[2];
  double inflow_flux[2];
  double dt;
  double tau;
};

LoqdSolver::LoqdSolver(SpatialMesh mesh, double light_speed) : mesh_(std::move(mesh)), c_(light_speed) {
  if (!(c_ > 0.0)) throw DomainError("LoqdSolver: light speed must be positive");
}

void LoqdSolver::solve_one(const SweepInput& in, Eigen::Ref<Eigen::VectorXd> energy, Eigen::Ref<Eigen::VectorXd> flux,
                           double& left_energy, double& right_energy) const {
  const auto nx = static_cast<Eigen::Index>(mesh_.cells());
  const double time_coef = in.tau / (c_ * in.dt);
  // F_j = a_j + l_j E_{j-1} + r_j E_j
  Eigen::VectorXd a(nx + 1);
  Eigen::VectorXd l = Eigen::VectorXd::Zero(nx + 1);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(nx + 1);

  for (Eigen::Index j = 1; j < nx; ++j) {
    const double d = 0.5 * (mesh_.width(static_cast<std::size_t>(j - 1)) + mesh_.width(static_cast<std::size_t>(j)));
    const double den = time_coef + in.face_kappa[j];
    if (!(den > 0.0)) throw NumericalError("LOQD: nonpositive face coefficient at face " + std::to_string(j));
    a[j] = time_coef * in.flux_prev[j] / den;
    l[j] = (c_ * in.eddington[j - 1] / d - 0.5 * in.eta[j]) / den;
    r[j] = (-c_ * in.eddington[j] / d - 0.5 * in.eta[j]) / den;
  }
  {
    const double beta = 2.0 * c_ / mesh_.width(0);
    const double fb = in.boundary_eddington[0];
    const double cb = in.outgoing[0];
    if (!(cb < 0.0)) throw NumericalError("LOQD: left outgoing factor must be negative");
    const double den = time_coef + in.face_kappa[0] - beta * fb / (c_ * cb);
    if (!(den > 0.0)) throw NumericalError("LOQD: nonpositive left boundary coefficient");
    a[0] = (time_coef * in.flux_prev[0] + beta * fb * (in.inflow_energy[0] - in.inflow_flux[0] / (c_ * cb))) / den;
    r[0] = -(beta * in.eddington[0] + in.eta[0]) / den;
  }
  {
    const double beta = 2.0 * c_ / mesh_.width(static_cast<std::size_t>(nx - 1));
    const double fb = in.boundary_eddington[1];
    const double cb = in.outgoing[1];
    if (!(cb > 0.0)) throw NumericalError("LOQD: right outgoing factor must be positive");
    const double den = time_coef + in.face_kappa[nx] + beta * fb / (c_ * cb);
    if (!(den > 0.0)) throw NumericalError("LOQD: nonpositive right boundary coefficient");
    a[nx] = (time_coef * in.flux_prev[nx] - beta * fb * (in.inflow_energy[1] - in.inflow_flux[1] / (c_ * cb))) / den;
    l[nx] = (beta * in.eddington[nx - 1] - in.eta[nx]) / den;
  }

  Eigen::VectorXd lower(nx);
  Eigen::VectorXd diag(nx);
  Eigen::VectorXd upper(nx);
  Eigen::VectorXd rhs(nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double h = mesh_.width(static_cast<std::size_t>(i));
    diag[i] = 1.0 / in.dt + in.absorb[i] + (l[i + 1] - r[i]) / h;
    lower[i] = -l[i] / h;
    upper[i] = r[i + 1] / h;
    rhs[i] = in.source[i] + in.energy_prev[i] / in.dt - (a[i + 1] - a[i]) / h;
  }
  energy = solve_tridiagonal(lower, diag, upper, rhs);
  for (Eigen::Index j = 0; j <= nx; ++j)
    flux[j] = a[j] + (j > 0 ? l[j] * energy[j - 1] : 0.0) + (j < nx ? r[j] * energy[j] : 0.0);
  left_energy = in.inflow_energy[0] + (flux[0] - in.inflow_flux[0]) / (c_ * in.outgoing[0]);
  right_energy = in.inflow_energy[1] + (flux[nx] - in.inflow_flux[1]) / (c_ * in.outgoing[1]);
}

MultigroupState LoqdSolver::solve_multigroup(const LoqdClosure& closure, const GroupCoefficients& material,
                                             const Eigen::MatrixXd& face_opacity, const MultigroupState& previous,
                                             const BoundaryInflow& inflow, double dt, bool transient) const {
  const Eigen::Index ng = material.opacity.rows();
  const auto nx = static_cast<Eigen::Index>(mesh_.cells());
  if (material.opacity.cols() != nx || closure.eddington.rows() != ng || closure.eddington.cols() != nx ||
      face_opacity.rows() != ng || face_opacity.cols() != nx + 1 || previous.energy.rows() != ng ||
      previous.energy.cols() != nx || previous.flux.cols() != nx + 1 || inflow.energy.rows() != ng)
    throw LayoutError("solve_multigroup: inconsistent table shapes");
  if (!(dt > 0.0)) throw DomainError("solve_multigroup: dt must be positive");

  MultigroupState out{Eigen::MatrixXd(ng, nx), Eigen::MatrixXd(ng, nx + 1), Eigen::MatrixXd(ng, 2)};
  SweepInput in;
  in.eta = Eigen::VectorXd::Zero(nx + 1);
  in.dt = dt;
  in.tau = transient ? 1.0 : 0.0;
  Eigen::VectorXd energy(nx);
  Eigen::VectorXd flux(nx + 1);
  for (Eigen::Index g = 0; g < ng; ++g) {
    in.eddington = closure.eddington.row(g).transpose();
    for (int s = 0; s < 2; ++s) {
      in.boundary_eddington[s] = closure.boundary_eddington(g, s);
      in.outgoing[s] = closure.outgoing_factor(g, s);
      in.inflow_energy[s] = inflow.energy(g, s);
      in.inflow_flux[s] = inflow.flux(g, s);
    }
    in.face_kappa = face_opacity.row(g).transpose();
    in.flux_prev = previous.flux.row(g).transpose();
    in.energy_prev = previous.energy.row(g).transpose();
    in.absorb = c_ * material.opacity.row(g).transpose();
    in.source = kFourPi * material.opacity.row(g).cwiseProduct(material.planck.row(g)).transpose();
    double eb_left = 0.0;
    double eb_right = 0.0;
    solve_one(in, energy, flux, eb_left, eb_right);
    out.energy.row(g) = energy.transpose();
    out.flux.row(g) = flux.transpose();
    out.boundary_energy(g, 0) = eb_left;
    out.boundary_energy(g, 1) = eb_right;
  }
  return out;
}

GreyCoefficients LoqdSolver::grey_closure(const MultigroupState& solution, const LoqdClosure& closure,
                                          const GroupCoefficients& material, const Eigen::MatrixXd& face_opacity,
                                          const BoundaryInflow& inflow) const {
  GreyCoefficients grey = grey_coefficients(solution.energy, solution.flux, closure.eddington, material.opacity,
                                            material.planck, face_opacity);
  for (int s = 0; s < 2; ++s) {
    const Eigen::VectorXd eb = solution.boundary_energy.col(s);
    const double total = eb.sum();
    grey.boundary_eddington[s] =
        total > 0.0 ? closure.boundary_eddington.col(s).dot(eb) / total : 1.0 / 3.0;
    const Eigen::VectorXd outgoing = (eb - inflow.energy.col(s)).cwiseAbs();
    const double out_total = outgoing.sum();
    grey.outgoing_factor[s] =
        out_total > 0.0 ? closure.outgoing_factor.col(s).dot(outgoing) / out_total : (s == 0 ? -0.5 : 0.5);
  }
  return grey;
}

GreyState LoqdSolver::solve_grey_fixed_emission(const GreyCoefficients& grey, const GreyState& previous,
                                                const Eigen::VectorXd& emission, const BoundaryInflow& inflow,
                                                double dt, bool transient) const {
  const auto nx = static_cast<Eigen::Index>(mesh_.cells());
  SweepInput in;
  in.eddington = grey.eddington;
  in.face_kappa = grey.kappa_r;
  in.eta = grey.eta;
  in.flux_prev = previous.flux;
  in.energy_prev = previous.energy;
  in.absorb = c_ * grey.kappa_e;
  in.source = emission;
  in.dt = dt;
  in.tau = transient ? 1.0 : 0.0;
  for (int s = 0; s < 2; ++s) {
    in.boundary_eddington[s] = grey.boundary_eddington[s];
    in.outgoing[s] = grey.outgoing_factor[s];
    in.inflow_energy[s] = inflow.grey_energy(static_cast<Side>(s));
    in.inflow_flux[s] = inflow.grey_flux(static_cast<Side>(s));
  }
  GreyState out{Eigen::VectorXd(nx), Eigen::VectorXd(nx + 1), previous.temperature};
  double eb_left = 0.0;
  double eb_right = 0.0;
  solve_one(in, out.energy, out.flux, eb_left, eb_right);
  return out;
}

LoqdSolver::GreyMebResult LoqdSolver::solve_grey_meb(const GreyCoefficients& grey, const GreyState& previous,
                                                     const BoundaryInflow& inflow, double dt, double a_rad,
                                                     const MaterialEos& eos, const Eigen::VectorXd& temperature_guess,
                                                     bool transient) const {
  const auto nx = static_cast<Eigen::Index>(mesh_.cells());
  if (temperature_guess.size() != nx || previous.temperature.size() != nx)
    throw LayoutError("solve_grey_meb: temperature field length does not match mesh");
  if (!(eos.cv > 0.0)) throw DomainError("solve_grey_meb: c_v must be positive");
  const double cv_dt = eos.cv / dt;

  SweepInput in;
  in.eddington = grey.eddington;
  in.face_kappa = grey.kappa_r;
  in.eta = grey.eta;
  in.flux_prev = previous.flux;
  in.energy_prev = previous.energy;
  in.absorb.resize(nx);
  in.source.resize(nx);
  in.dt = dt;
  in.tau = transient ? 1.0 : 0.0;
  for (int s = 0; s < 2; ++s) {
    in.boundary_eddington[s] = grey.boundary_eddington[s];
    in.outgoing[s] = grey.outgoing_factor[s];
    in.inflow_energy[s] = inflow.grey_energy(static_cast<Side>(s));
    in.inflow_flux[s] = inflow.grey_flux(static_cast<Side>(s));
  }

  GreyMebResult result;
  GreyState& st = result.state;
  st.energy = Eigen::VectorXd::Zero(nx);
  st.flux = Eigen::VectorXd::Zero(nx + 1);
  st.temperature = temperature_guess;
  Eigen::VectorXd lin_t = temperature_guess;
  Eigen::VectorXd last_energy;
  for (std::size_t it = 1; it <= kGreyMaxIterations; ++it) {
    // Emission linearized about lin_t with T eliminated through the
    // linearized material balance.
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double t = std::max(lin_t[i], 0.0);
      const double kb = c_ * grey.kappa_b[i] * a_rad;
      const double t3 = t * t * t;
      const double d_t = cv_dt + 4.0 * kb * t3;
      const double alpha = cv_dt * previous.temperature[i] + 3.0 * kb * t3 * t;
      const double nu = 4.0 * kb * t3 / d_t;
      in.absorb[i] = c_ * grey.kappa_e[i] * (1.0 - nu);
      in.source[i] = nu * alpha - 3.0 * kb * t3 * t;
    }
    double eb_left = 0.0;
    double eb_right = 0.0;
    solve_one(in, st.energy, st.flux, eb_left, eb_right);
    for (Eigen::Index i = 0; i < nx; ++i)
      st.temperature[i] = solve_meb_temperature(previous.temperature[i], dt, eos.cv, c_, grey.kappa_b[i],
                                                grey.kappa_e[i], st.energy[i], a_rad);
    const bool t_done = relative_change(st.temperature, lin_t) <= kGreyTolerance;
    const bool e_done = it > 1 && relative_change(st.energy, last_energy) <= kGreyTolerance;
    result.iterations = it;
    if (t_done && (e_done || st.temperature == lin_t)) return result;
    lin_t = st.temperature;
    last_energy = st.energy;
  }
  throw NumericalError("solve_grey_meb: coupled grey/material iteration did not converge in " +
                       std::to_string(kGreyMaxIterations) + " iterations");
}

double LoqdSolver::meb_residual(const GreyCoefficients& grey, const GreyState& previous, const GreyState& state,
                                double dt, double a_rad, const MaterialEos& eos) const {
  double worst = 0.0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < state.temperature.size(); ++i) {
    const double t = state.temperature[i];
    const double r = eos.cv * (t - previous.temperature[i]) / dt -
                     c_ * (grey.kappa_e[i] * state.energy[i] - grey.kappa_b[i] * a_rad * t * t * t * t);
    worst = std::max(worst, std::abs(r));
    scale = std::max(scale, eos.cv * std::abs(t) / dt);
  }
  return scale > 0.0 ? worst / scale : worst;
}

double LoqdSolver::energy_bookkeeping(const GreyState& previous, const GreyState& state, double dt,
                                      const MaterialEos& eos) const {
  double radiation = 0.0;
  double material = 0.0;
  for (std::size_t i = 0; i < mesh_.cells(); ++i) {
    const auto ie = static_cast<Eigen::Index>(i);
    const double h = mesh_.width(i);
    radiation += h * (state.energy[ie] - previous.energy[ie]);
    material += h * (eos.energy(state.temperature[ie]) - eos.energy(previous.temperature[ie]));
  }
  const Eigen::Index nx = state.flux.size() - 1;
  const double leakage = dt * (state.flux[nx] - state.flux[0]);
  const double magnitude = std::abs(radiation) + std::abs(material) + std::abs(dt * state.flux[nx]) +
                           std::abs(dt * state.flux[0]);
  const double imbalance = radiation + material + leakage;
  return magnitude > 0.0 ? std::abs(imbalance) / magnitude : 0.0;
}

}  // namespace trtrom
