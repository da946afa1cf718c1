#include "trtrom/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "trtrom/error.hpp"

namespace trtrom {

BaselineKind parse_baseline_kind(const std::string& name) {
  if (name == "p1" || name == "P1") return BaselineKind::kP1;
  if (name == "fld" || name == "FLD") return BaselineKind::kFld;
  throw ConfigError("unknown baseline kind '" + name + "' (expected p1 or fld)");
}

std::string to_string(BaselineKind kind) { return kind == BaselineKind::kP1 ? "p1" : "fld"; }

LoqdClosure p1_closure(std::size_t groups, std::size_t cells) { return LoqdClosure::diffusion(groups, cells); }

LoqdClosure fld_closure(std::size_t groups, std::size_t cells) {
  LoqdClosure c = LoqdClosure::diffusion(groups, cells);
  c.eddington.setOnes();
  c.boundary_eddington.setOnes();
  return c;
}

Eigen::MatrixXd FluxLimitedLaw::limiter(const MultigroupState& latest, const Eigen::MatrixXd& face_kappa) const {
  const Eigen::Index ng = latest.energy.rows();
  const Eigen::Index nx = latest.energy.cols();
  Eigen::MatrixXd out(ng, nx + 1);
  constexpr double kTiny = std::numeric_limits<double>::min();
  for (Eigen::Index g = 0; g < ng; ++g)
    for (Eigen::Index f = 0; f <= nx; ++f) {
      double grad = 0.0;
      double e_face = 0.0;
      if (f == 0) {
        grad = (latest.energy(g, 0) - latest.boundary_energy(g, 0)) / (0.5 * mesh_.width(0));
        e_face = latest.boundary_energy(g, 0);
      } else if (f == nx) {
        const auto last = static_cast<std::size_t>(nx - 1);
        grad = (latest.boundary_energy(g, 1) - latest.energy(g, nx - 1)) / (0.5 * mesh_.width(last));
        e_face = latest.boundary_energy(g, 1);
      } else {
        const auto i = static_cast<std::size_t>(f);
        grad = (latest.energy(g, f) - latest.energy(g, f - 1)) / (0.5 * (mesh_.width(i - 1) + mesh_.width(i)));
        e_face = 0.5 * (latest.energy(g, f - 1) + latest.energy(g, f));
      }
      const double r = std::abs(grad) / std::max(face_kappa(g, f) * e_face, kTiny);
      out(g, f) = 1.0 / std::sqrt(9.0 + r * r);
    }
  return out;
}

Eigen::MatrixXd FluxLimitedLaw::face_opacity(const GroupCoefficients& material, const MultigroupState& latest) const {
  const Eigen::MatrixXd kappa = face_opacities(material.opacity);
  return kappa.cwiseQuotient(limiter(latest, kappa));
}

namespace {

// The lagged limiter contracts slowly while the front crosses the first cells.
constexpr std::size_t kFldInnerCap = 5000;

}  // namespace

RunRecord run_baseline(const Problem& input, BaselineKind kind) {
  Problem problem = input;
  if (kind == BaselineKind::kFld)
    problem.settings.max_inner = std::max(problem.settings.max_inner, kFldInnerCap);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t ng = problem.material.group_count();
  const std::size_t nx = problem.mesh.cells();
  const FluxLimitedLaw fld(problem.mesh);
  const FaceLaw* law = kind == BaselineKind::kFld ? static_cast<const FaceLaw*>(&fld) : nullptr;
  const LoqdClosure closure = kind == BaselineKind::kFld ? fld_closure(ng, nx) : p1_closure(ng, nx);
  MlqdSolver solver(problem, nullptr, law);

  RunRecord rec;
  MlqdState state = solver.initial_state();
  rec.append(0.0, state);
  for (std::size_t n = 1; n <= problem.time.steps(); ++n) {
    const double dt = problem.time.dt(n);
    StepDiagnostics diag;
    diag.step = n;
    diag.time = problem.time.time(n);
    diag.outer_iterations = 1;
    MlqdState next = state;
    diag.inner_iterations = solver.solve_ladder(closure, state, next, dt);
    diag.energy_balance = solver.loqd().energy_bookkeeping(state.grey, next.grey, dt, problem.material.eos());
    state = std::move(next);
    rec.steps.push_back(diag);
    rec.append(diag.time, state);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace trtrom
