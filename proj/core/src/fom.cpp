#include "trtrom/fom.hpp"

#include "trtrom/error.hpp"

namespace trtrom {

IntensityField initial_intensity(const Problem& problem) {
  const auto nx = static_cast<Eigen::Index>(problem.mesh.cells());
  const Eigen::MatrixXd planck = problem.material.planck_spectrum(problem.initial_temperature).replicate(1, nx);
  return equilibrium_intensity(problem.layout(), planck);
}

TransportModel::TransportModel(const Problem& problem, const ScbTransport& transport)
    : problem_(problem), transport_(transport), previous_(initial_intensity(problem)), current_(previous_) {}

const IntensityField& TransportModel::solve(const GroupCoefficients& material, double dt, StepDiagnostics& diag) {
  std::size_t negatives = 0;
  current_ = transport_.sweep(material, previous_, dt, problem_.boundary, &negatives);
  diag.negative_intensities = negatives;
  return current_;
}

void TransportModel::end_step(std::size_t /*step*/) { previous_ = current_; }

FomResult run_fom(const Problem& problem) {
  const ScbTransport transport = problem.transport();
  TransportModel model(problem, transport);
  MlqdSolver solver(problem, &model);

  const TimeGrid& time = problem.time;
  const auto d = static_cast<Eigen::Index>(problem.layout().size());
  const std::uint64_t fingerprint = grid_fingerprint(problem.mesh, problem.quadrature, problem.material.groups());

  FomResult out;
  std::vector<SnapshotDatabase> dbs(time.stage_count());
  for (std::size_t s = 0; s < dbs.size(); ++s) {
    const auto n = static_cast<Eigen::Index>(time.steps_in_stage(s));
    dbs[s].snapshots.resize(d, n);
    dbs[s].dt.resize(n);
    dbs[s].stage = s;
    dbs[s].fingerprint = fingerprint;
    dbs[s].cells = problem.mesh.cells();
    dbs[s].angles = problem.quadrature.size();
    dbs[s].groups = problem.material.group_count();
  }

  out.record = solver.run([&](std::size_t n, const MlqdState&) {
    const std::size_t s = time.stage_of_step(n);
    const auto col = static_cast<Eigen::Index>(n - time.first_step(s));
    dbs[s].snapshots.col(col) = model.previous();
    dbs[s].dt[col] = time.dt(n);
  });

  for (auto& db : dbs)
    if (db.snapshots.cols() > 0) out.databases.push_back(std::move(db));
  return out;
}

}  // namespace trtrom
