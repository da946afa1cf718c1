#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "trtrom/config.hpp"
#include "trtrom/fom.hpp"
#include "trtrom/loqd.hpp"
#include "trtrom/moments.hpp"
#include "trtrom/pod.hpp"
#include "trtrom/rom.hpp"

using namespace trtrom;

namespace {

const Problem& fc_problem() {
  static const Problem p = RunConfig::fleck_cummings().problem();
  return p;
}

Eigen::VectorXd ramp_temperature(std::size_t cells) {
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(cells), 1.0, 0.001);
}

Eigen::MatrixXd random_snapshots(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return u(rng); });
}

void BM_MaterialEvaluate(benchmark::State& state) {
  const Problem& p = fc_problem();
  const Eigen::VectorXd t = ramp_temperature(p.mesh.cells());
  for (auto _ : state) benchmark::DoNotOptimize(p.material.evaluate(t));
}
BENCHMARK(BM_MaterialEvaluate);

void BM_TransportSweep(benchmark::State& state) {
  const Problem& p = fc_problem();
  const ScbTransport transport = p.transport();
  const GroupCoefficients mat = p.material.evaluate(ramp_temperature(p.mesh.cells()));
  const IntensityField prev = initial_intensity(p);
  for (auto _ : state) benchmark::DoNotOptimize(transport.sweep(mat, prev, 0.02, p.boundary));
}
BENCHMARK(BM_TransportSweep);

void BM_MultigroupLoqd(benchmark::State& state) {
  const Problem& p = fc_problem();
  const ScbTransport transport = p.transport();
  const GroupCoefficients mat = p.material.evaluate(ramp_temperature(p.mesh.cells()));
  const IntensityField i0 = initial_intensity(p);
  const MomentFields m = compute_moments(transport, i0, p.boundary);
  const LoqdClosure closure = LoqdClosure::from(m);
  const BoundaryInflow inflow = BoundaryInflow::from(transport, p.boundary);
  const MultigroupState prev{m.energy, m.flux, Eigen::MatrixXd::Zero(m.energy.rows(), 2)};
  const Eigen::MatrixXd faces = face_opacities(mat.opacity);
  const LoqdSolver solver(p.mesh, p.material.constants().c);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve_multigroup(closure, mat, faces, prev, inflow, 0.02));
}
BENCHMARK(BM_MultigroupLoqd);

void BM_PodBasis(benchmark::State& state) {
  const Problem& p = fc_problem();
  const WeightOperator w(p.mesh, p.quadrature, p.material.group_count());
  SnapshotDatabase db;
  db.snapshots = random_snapshots(w.size(), state.range(0));
  db.dt = Eigen::VectorXd::Constant(state.range(0), 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(compute_pod_basis(db, w));
}
BENCHMARK(BM_PodBasis)->Arg(15)->Arg(45)->Arg(240)->Unit(benchmark::kMillisecond);

void BM_ReducedStep(benchmark::State& state) {
  const Problem& p = fc_problem();
  const ScbTransport transport = p.transport();
  const WeightOperator w(p.mesh, p.quadrature, p.material.group_count());
  SnapshotDatabase db;
  db.snapshots = random_snapshots(w.size(), 40);
  db.dt = Eigen::VectorXd::Constant(40, 0.02);
  const PodBasis basis = compute_pod_basis(db, w);
  const auto r = static_cast<std::size_t>(state.range(0));
  const ReducedOperators ops(transport, basis, r, w, p.boundary);
  const GroupCoefficients mat = p.material.evaluate(ramp_temperature(p.mesh.cells()));
  const Eigen::VectorXd prev = project(db.snapshots.col(0), basis, r, w);
  for (auto _ : state) benchmark::DoNotOptimize(solve_reduced_step(ops, prev, mat, 0.02, transport.light_speed()));
}
BENCHMARK(BM_ReducedStep)->Arg(5)->Arg(15)->Arg(34);

}  // namespace

BENCHMARK_MAIN();
