#include "trtrom/rom.hpp"

#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "trtrom/error.hpp"
#include "trtrom/fom.hpp"

namespace trtrom {

namespace {

Eigen::Index packed_size(std::size_t r) { return static_cast<Eigen::Index>(r * (r + 1) / 2); }

}  // namespace

ReducedOperators::ReducedOperators(const ScbTransport& transport, const PodBasis& basis, std::size_t rank,
                                   const WeightOperator& w, const BoundarySpec& bc)
    : r_(rank), nx_(transport.layout().cells()), ng_(transport.layout().groups()) {
  const auto& layout = transport.layout();
  if (rank == 0 || rank > basis.rank())
    throw DomainError("reduced operators: rank " + std::to_string(rank) + " outside 1.." +
                      std::to_string(basis.rank()));
  if (basis.vectors.rows() != static_cast<Eigen::Index>(layout.size()) || w.size() != basis.vectors.rows())
    throw LayoutError("reduced operators: basis length does not match the transport grid");
  const auto re = static_cast<Eigen::Index>(rank);
  const auto u = basis.vectors.leftCols(re);
  const Eigen::MatrixXd wu = w.diagonal().asDiagonal() * u;

  Eigen::MatrixXd lu(u.rows(), re);
  for (Eigen::Index l = 0; l < re; ++l) lu.col(l) = transport.apply_streaming(u.col(l));
  streaming_ = wu.transpose() * lu;
  inflow_ = wu.transpose() * transport.assemble_inflow(bc);

  const std::size_t nmu = layout.angles();
  const auto rows = static_cast<Eigen::Index>(nmu * PhaseSpaceLayout::kCorners);
  gram_.resize(packed_size(rank), static_cast<Eigen::Index>(nx_ * ng_));
  emission_.resize(re, static_cast<Eigen::Index>(nx_ * ng_));
  Eigen::MatrixXd block(rows, re);
  Eigen::MatrixXd g(re, re);
  for (std::size_t i = 0; i < nx_; ++i)
    for (std::size_t gr = 0; gr < ng_; ++gr) {
      Eigen::VectorXd em = Eigen::VectorXd::Zero(re);
      for (std::size_t m = 0; m < nmu; ++m)
        for (std::size_t c = 0; c < PhaseSpaceLayout::kCorners; ++c) {
          const auto k = static_cast<Eigen::Index>(layout.index(c, i, m, gr));
          block.row(static_cast<Eigen::Index>(m * PhaseSpaceLayout::kCorners + c)) = w.sqrt_diagonal()[k] * u.row(k);
          em += wu.row(k).transpose();
        }
      const auto col = static_cast<Eigen::Index>(i * ng_ + gr);
      emission_.col(col) = em;
      g.noalias() = block.transpose() * block;
      Eigen::Index p = 0;
      for (Eigen::Index b = 0; b < re; ++b)
        for (Eigen::Index a = 0; a <= b; ++a) gram_(p++, col) = g(a, b);
    }
}

Eigen::MatrixXd ReducedOperators::unpack(const Eigen::VectorXd& packed) const {
  const auto re = static_cast<Eigen::Index>(r_);
  Eigen::MatrixXd out(re, re);
  Eigen::Index p = 0;
  for (Eigen::Index b = 0; b < re; ++b)
    for (Eigen::Index a = 0; a <= b; ++a) {
      out(a, b) = packed[p];
      out(b, a) = packed[p];
      ++p;
    }
  return out;
}

Eigen::MatrixXd ReducedOperators::gram_block(std::size_t cell, std::size_t group) const {
  return unpack(gram_.col(static_cast<Eigen::Index>(cell * ng_ + group)));
}

Eigen::MatrixXd ReducedOperators::removal(const Eigen::MatrixXd& opacity) const {
  if (opacity.rows() != static_cast<Eigen::Index>(ng_) || opacity.cols() != static_cast<Eigen::Index>(nx_))
    throw LayoutError("reduced removal: opacity table has the wrong shape");
  const Eigen::Map<const Eigen::VectorXd> kappa(opacity.data(), opacity.size());
  return unpack(gram_ * kappa);
}

Eigen::VectorXd ReducedOperators::source(const GroupCoefficients& material) const {
  if (material.opacity.rows() != static_cast<Eigen::Index>(ng_) ||
      material.opacity.cols() != static_cast<Eigen::Index>(nx_) || material.planck.rows() != material.opacity.rows() ||
      material.planck.cols() != material.opacity.cols())
    throw LayoutError("reduced source: material tables have the wrong shape");
  const Eigen::MatrixXd q = 2.0 * std::numbers::pi * material.opacity.cwiseProduct(material.planck);
  const Eigen::Map<const Eigen::VectorXd> v(q.data(), q.size());
  return emission_ * v + inflow_;
}

ReducedSolution solve_reduced_step(const ReducedOperators& ops, const Eigen::VectorXd& previous,
                                   const GroupCoefficients& material, double dt, double light_speed) {
  const auto re = static_cast<Eigen::Index>(ops.rank());
  if (previous.size() != re) throw LayoutError("reduced solve: coefficient count does not match the rank");
  if (!(dt > 0.0)) throw DomainError("reduced solve: dt must be positive");
  const double tau = 1.0 / (light_speed * dt);
  Eigen::MatrixXd a = ops.streaming() + ops.removal(material.opacity);
  a.diagonal().array() += tau;
  const Eigen::VectorXd rhs = tau * previous + ops.source(material);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  ReducedSolution out;
  out.rcond = lu.rcond();
  if (!(out.rcond > std::numeric_limits<double>::epsilon()))
    throw NumericalError("reduced solve: system is singular to working precision (rcond " +
                         std::to_string(out.rcond) + ")");
  out.coefficients = lu.solve(rhs);
  return out;
}

Eigen::VectorXd stage_transition(const Eigen::VectorXd& coefficients, const PodBasis& from, const PodBasis& to,
                                 std::size_t r_new, const WeightOperator& w, double* residual) {
  if (from.fingerprint != to.fingerprint) throw FormatError("stage transition: bases were built on different grids");
  const Eigen::VectorXd field = reconstruct(coefficients, from);
  Eigen::VectorXd out = project(field, to, r_new, w);
  if (residual != nullptr) {
    const double n = w.norm(field);
    const double e = w.norm(field - reconstruct(out, to));
    *residual = n > 0.0 ? e / n : e;
  }
  return out;
}

std::vector<std::size_t> ranks_for_eps(const std::vector<PodBasis>& bases, double eps) {
  std::vector<std::size_t> out;
  out.reserve(bases.size());
  for (const auto& b : bases) out.push_back(select_rank(b.singular_values, eps));
  return out;
}

void check_bases(const Problem& problem, const std::vector<PodBasis>& bases) {
  const std::uint64_t fp = grid_fingerprint(problem.mesh, problem.quadrature, problem.material.groups());
  if (bases.size() < problem.time.stage_count())
    throw DomainError("ROM: " + std::to_string(bases.size()) + " bases for " +
                      std::to_string(problem.time.stage_count()) + " stages");
  for (std::size_t s = 0; s < bases.size(); ++s) {
    if (bases[s].fingerprint != fp)
      throw FormatError("ROM: basis for stage " + std::to_string(s) + " was built on a different grid");
    if (bases[s].stage != s)
      throw DomainError("ROM: basis " + std::to_string(s) + " belongs to stage " + std::to_string(bases[s].stage));
  }
}

PodGalerkinModel::PodGalerkinModel(const Problem& problem, const ScbTransport& transport,
                                   const std::vector<PodBasis>& bases, std::vector<std::size_t> ranks)
    : problem_(problem),
      transport_(transport),
      bases_(bases),
      ranks_(std::move(ranks)),
      weight_(problem.mesh, problem.quadrature, problem.material.group_count()) {
  check_bases(problem, bases);
  if (ranks_.size() < problem.time.stage_count()) throw DomainError("ROM: missing per-stage ranks");
  for (std::size_t s = 0; s < problem.time.stage_count(); ++s)
    if (ranks_[s] == 0 || ranks_[s] > bases[s].rank())
      throw DomainError("ROM: rank " + std::to_string(ranks_[s]) + " for stage " + std::to_string(s) +
                        " outside 1.." + std::to_string(bases[s].rank()));
  activate(0);
  previous_ = project(initial_intensity(problem), bases_[0], ranks_[0], weight_);
  current_ = previous_;
  intensity_ = reconstruct(current_, bases_[0]);
}

void PodGalerkinModel::activate(std::size_t stage) {
  ops_.reset();
  ops_ = std::make_unique<ReducedOperators>(transport_, bases_[stage], ranks_[stage], weight_, problem_.boundary);
  stage_ = stage;
}

void PodGalerkinModel::begin_step(std::size_t step, StepDiagnostics& diag) {
  const std::size_t stage = problem_.time.stage_of_step(step);
  if (stage != stage_) {
    double residual = 0.0;
    previous_ = stage_transition(previous_, bases_[stage_], bases_[stage], ranks_[stage], weight_, &residual);
    diag.transition_residual = residual;
    activate(stage);
  }
  diag.rank = ranks_[stage_];
}

const IntensityField& PodGalerkinModel::solve(const GroupCoefficients& material, double dt, StepDiagnostics& diag) {
  const ReducedSolution sol = solve_reduced_step(*ops_, previous_, material, dt, transport_.light_speed());
  current_ = sol.coefficients;
  diag.reduced_rcond = sol.rcond;
  intensity_ = reconstruct(current_, bases_[stage_]);
  diag.negative_intensities = static_cast<std::size_t>((intensity_.array() < 0.0).count());
  return intensity_;
}

void PodGalerkinModel::end_step(std::size_t /*step*/) { previous_ = current_; }

RunRecord run_rom(const Problem& problem, const std::vector<PodBasis>& bases, const std::vector<std::size_t>& ranks) {
  const ScbTransport transport = problem.transport();
  PodGalerkinModel model(problem, transport, bases, ranks);
  MlqdSolver solver(problem, &model);
  return solver.run();
}

}  // namespace trtrom
