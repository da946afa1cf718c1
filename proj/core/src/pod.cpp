#include "trtrom/pod.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "trtrom/error.hpp"

namespace trtrom {

namespace {

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      hash_ ^= (v >> (8 * b)) & 0xffU;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

Eigen::MatrixXd weighted_matrix(const SnapshotDatabase& db, const WeightOperator& w) {
  if (db.snapshots.cols() == 0) throw DomainError("POD: snapshot database is empty");
  if (db.snapshots.rows() != w.size())
    throw LayoutError("POD: snapshot length " + std::to_string(db.snapshots.rows()) + " does not match weight size " +
                      std::to_string(w.size()));
  if (db.dt.size() != db.snapshots.cols()) throw LayoutError("POD: step-size count does not match column count");
  if ((db.dt.array() <= 0.0).any()) throw DomainError("POD: step sizes must be positive");
  return w.sqrt_diagonal().asDiagonal() * db.snapshots * db.dt.cwiseSqrt().asDiagonal();
}

struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
};

ThinSvd thin_svd(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU);
  if (svd.info() != Eigen::Success) throw NumericalError("POD: SVD failed");
  ThinSvd out;
  out.s = svd.singularValues();
  out.u = qr.householderQ() * (Eigen::MatrixXd(a.rows(), n) << svd.matrixU(), Eigen::MatrixXd::Zero(a.rows() - n, n))
                                  .finished();
  return out;
}

}  // namespace

std::uint64_t grid_fingerprint(const SpatialMesh& mesh, const AngularQuadrature& quad, const GroupStructure& groups) {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(mesh.cells()));
  h.add(static_cast<std::uint64_t>(quad.size()));
  h.add(static_cast<std::uint64_t>(groups.size()));
  h.add(static_cast<std::uint64_t>(PhaseSpaceLayout::kCorners));
  for (double v : mesh.widths()) h.add(v);
  for (double v : quad.nodes()) h.add(v);
  for (double v : quad.weights()) h.add(v);
  for (double v : groups.boundaries()) h.add(v);
  return h.value();
}

WeightOperator::WeightOperator(const SpatialMesh& mesh, const AngularQuadrature& quad, std::size_t groups) {
  const PhaseSpaceLayout layout(mesh.cells(), quad.size(), groups);
  diag_.resize(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t m = 0; m < quad.size(); ++m)
      for (std::size_t i = 0; i < mesh.cells(); ++i) {
        const double v = quad.weight(m) * mesh.width(i) / 2.0;
        const auto k = static_cast<Eigen::Index>(layout.index(0, i, m, g));
        diag_[k] = v;
        diag_[k + 1] = v;
      }
  sqrt_ = diag_.cwiseSqrt();
}

double WeightOperator::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (a.size() != diag_.size() || b.size() != diag_.size())
    throw LayoutError("WeightOperator: vector length does not match the grid");
  return (a.array() * diag_.array() * b.array()).sum();
}

Eigen::VectorXd weighted_singular_values(const SnapshotDatabase& db, const WeightOperator& w) {
  const Eigen::MatrixXd a = weighted_matrix(db, w);
  if (a.rows() >= a.cols()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    return Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
}

PodBasis compute_pod_basis(const SnapshotDatabase& db, const WeightOperator& w, const PodOptions& options) {
  const Eigen::MatrixXd a = weighted_matrix(db, w);
  if (a.rows() < a.cols()) throw LayoutError("POD: more snapshots than phase-space unknowns");
  const ThinSvd svd = thin_svd(a);

  const double tol = options.rank_tolerance >= 0.0
                         ? options.rank_tolerance
                         : static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon();
  const double s1 = svd.s.size() > 0 ? svd.s[0] : 0.0;
  Eigen::Index d = 0;
  while (d < svd.s.size() && svd.s[d] > tol * s1) ++d;
  if (d == 0) throw NumericalError("POD: snapshot matrix has zero numerical rank");

  PodBasis basis;
  basis.singular_values = svd.s.head(d);
  basis.vectors = w.sqrt_diagonal().cwiseInverse().asDiagonal() * svd.u.leftCols(d);
  for (Eigen::Index l = 0; l < d; ++l) {
    Eigen::Index arg = 0;
    basis.vectors.col(l).cwiseAbs().maxCoeff(&arg);
    if (basis.vectors(arg, l) < 0.0) basis.vectors.col(l) *= -1.0;
  }
  basis.stage = db.stage;
  basis.fingerprint = db.fingerprint;
  basis.cells = db.cells;
  basis.angles = db.angles;
  basis.groups = db.groups;
  return basis;
}

double tail_ratio(const Eigen::VectorXd& s, std::size_t r) {
  const double total = s.squaredNorm();
  if (!(total > 0.0)) return 0.0;
  double tail = 0.0;
  for (Eigen::Index l = s.size() - 1; l >= static_cast<Eigen::Index>(r); --l) tail += s[l] * s[l];
  return std::sqrt(tail / total);
}

std::size_t select_rank(const Eigen::VectorXd& s, double eps) {
  if (s.size() == 0) throw DomainError("select_rank: no singular values");
  if (!(eps > 0.0)) throw DomainError("select_rank: eps must be positive");
  const double total = s.squaredNorm();
  // Accumulate the tail from the smallest value so tiny ratios are resolved.
  std::vector<double> tail(static_cast<std::size_t>(s.size()) + 1, 0.0);
  for (Eigen::Index l = s.size() - 1; l >= 0; --l)
    tail[static_cast<std::size_t>(l)] = tail[static_cast<std::size_t>(l) + 1] + s[l] * s[l];
  for (std::size_t r = 1; r < tail.size(); ++r)
    if (std::sqrt(tail[r] / total) < eps) return r;
  return static_cast<std::size_t>(s.size());
}

Eigen::VectorXd project(const Eigen::VectorXd& intensity, const PodBasis& basis, std::size_t r,
                        const WeightOperator& w) {
  if (r == 0 || r > basis.rank())
    throw DomainError("project: rank " + std::to_string(r) + " outside 1.." + std::to_string(basis.rank()));
  if (intensity.size() != basis.vectors.rows() || w.size() != intensity.size())
    throw LayoutError("project: intensity length does not match the basis");
  const auto re = static_cast<Eigen::Index>(r);
  return basis.vectors.leftCols(re).transpose() * w.diagonal().cwiseProduct(intensity);
}

Eigen::VectorXd reconstruct(const Eigen::VectorXd& coefficients, const PodBasis& basis) {
  if (coefficients.size() == 0 || coefficients.size() > basis.vectors.cols())
    throw DomainError("reconstruct: coefficient count " + std::to_string(coefficients.size()) +
                      " outside 1.." + std::to_string(basis.rank()));
  return basis.vectors.leftCols(coefficients.size()) * coefficients;
}

}  // namespace trtrom
