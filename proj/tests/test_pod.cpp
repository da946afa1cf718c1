#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "trtrom/error.hpp"
#include "trtrom/fom.hpp"
#include "trtrom/pod.hpp"

using namespace trtrom;

namespace {

struct Grid {
  SpatialMesh mesh{{0.5, 0.25, 1.0}};
  AngularQuadrature quad = AngularQuadrature::double_gauss_legendre(2);
  std::size_t groups = 2;
  Eigen::Index d() const { return static_cast<Eigen::Index>(2 * mesh.cells() * quad.size() * groups); }
};

SnapshotDatabase random_db(const Grid& g, Eigen::Index n, std::mt19937_64& rng) {
  SnapshotDatabase db;
  db.snapshots = oracle::random_matrix(g.d(), n, rng);
  db.dt = oracle::random_matrix(n, 1, rng, 0.01, 0.05).col(0);
  db.cells = g.mesh.cells();
  db.angles = g.quad.size();
  db.groups = g.groups;
  return db;
}

Eigen::MatrixXd weighted(const SnapshotDatabase& db, const WeightOperator& w) {
  return w.sqrt_diagonal().asDiagonal() * db.snapshots * db.dt.cwiseSqrt().asDiagonal();
}

}  // namespace

TEST_SUITE("pod") {
  TEST_CASE("weight operator") {
    const Grid g;
    const WeightOperator w(g.mesh, g.quad, g.groups);
    const PhaseSpaceLayout lay(g.mesh.cells(), g.quad.size(), g.groups);
    REQUIRE(w.size() == g.d());
    for (std::size_t k = 0; k < lay.size(); ++k) {
      const auto c = lay.coord(k);
      CHECK(w.diagonal()[static_cast<Eigen::Index>(k)] == doctest::Approx(g.quad.weight(c.angle) * g.mesh.width(c.cell) / 2.0));
    }
    CHECK(w.diagonal().sum() == doctest::Approx(static_cast<double>(g.groups) * 2.0 * g.mesh.length()));
    CHECK((w.diagonal().array() > 0.0).all());
    CHECK((w.sqrt_diagonal().cwiseProduct(w.sqrt_diagonal()) - w.diagonal()).norm() < 1e-15);
  }

  TEST_CASE("Eckart-Young identity in the weighted norm") {
    const Grid g;
    const WeightOperator w(g.mesh, g.quad, g.groups);
    std::mt19937_64 rng(17);
    for (Eigen::Index n : {3, 7, 12}) {
      const SnapshotDatabase db = random_db(g, n, rng);
      const PodBasis basis = compute_pod_basis(db, w);
      const Eigen::MatrixXd ahat = weighted(db, w);
      const Eigen::VectorXd ref = Eigen::BDCSVD<Eigen::MatrixXd>(ahat).singularValues();
      REQUIRE(basis.rank() == static_cast<std::size_t>(n));
      CHECK((basis.singular_values - ref).norm() < 1e-12 * ref[0]);
      const double total = ahat.norm();
      for (std::size_t r = 0; r <= basis.rank(); ++r) {
        const Eigen::MatrixXd u = basis.vectors.leftCols(static_cast<Eigen::Index>(r));
        const Eigen::MatrixXd proj = u * (u.transpose() * w.diagonal().asDiagonal() * db.snapshots);
        const double err = (w.sqrt_diagonal().asDiagonal() * (db.snapshots - proj) * db.dt.cwiseSqrt().asDiagonal()).norm();
        const double tail = basis.singular_values.tail(basis.singular_values.size() - static_cast<Eigen::Index>(r)).norm();
        CAPTURE(n);
        CAPTURE(r);
        CHECK(std::abs(err - tail) <= 1e-8 * total);
      }
    }
  }

  TEST_CASE("bases are W-orthonormal and follow the sign convention") {
    const Grid g;
    const WeightOperator w(g.mesh, g.quad, g.groups);
    std::mt19937_64 rng(4);
    const SnapshotDatabase db = random_db(g, 9, rng);
    const PodBasis b = compute_pod_basis(db, w);
    const Eigen::MatrixXd gram = b.vectors.transpose() * w.diagonal().asDiagonal() * b.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index l = 0; l < b.vectors.cols(); ++l) {
      Eigen::Index arg = 0;
      b.vectors.col(l).cwiseAbs().maxCoeff(&arg);
      CHECK(b.vectors(arg, l) > 0.0);
    }
    for (Eigen::Index l = 1; l < b.singular_values.size(); ++l) CHECK(b.singular_values[l] <= b.singular_values[l - 1]);
  }

  TEST_CASE("bases of a full-order run are W-orthonormal") {
    const Problem p = fixture::small_config().problem();
    const FomResult r = run_fom(p);
    const WeightOperator w(p.mesh, p.quadrature, p.material.group_count());
    for (const auto& db : r.databases) {
      const PodBasis b = compute_pod_basis(db, w);
      const Eigen::MatrixXd gram = b.vectors.transpose() * w.diagonal().asDiagonal() * b.vectors;
      CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
      // every snapshot is reproduced by the full basis
      const Eigen::MatrixXd coeff = b.vectors.transpose() * w.diagonal().asDiagonal() * db.snapshots;
      const double err = (b.vectors * coeff - db.snapshots).norm() / db.snapshots.norm();
      CHECK(err < 1e-9);
    }
  }

  TEST_CASE("basis is invariant under uniform scaling of the step sizes") {
    const Grid g;
    const WeightOperator w(g.mesh, g.quad, g.groups);
    std::mt19937_64 rng(8);
    SnapshotDatabase db = random_db(g, 6, rng);
    db.dt.setConstant(0.02);
    const PodBasis a = compute_pod_basis(db, w);
    db.dt *= 7.5;
    const PodBasis b = compute_pod_basis(db, w);
    REQUIRE(a.rank() == b.rank());
    CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((b.singular_values / std::sqrt(7.5) - a.singular_values).norm() < 1e-12 * a.singular_values[0]);
  }

  TEST_CASE("numerical rank drops dependent columns") {
    const Grid g;
    const WeightOperator w(g.mesh, g.quad, g.groups);
    std::mt19937_64 rng(9);
    SnapshotDatabase db = random_db(g, 4, rng);
    db.snapshots.conservativeResize(Eigen::NoChange, 6);
    db.snapshots.col(4) = 2.0 * db.snapshots.col(0) - db.snapshots.col(1);
    db.snapshots.col(5) = db.snapshots.col(2);
    db.dt.conservativeResize(6);
    db.dt.tail(2).setConstant(0.03);
    CHECK(compute_pod_basis(db, w).rank() == 4);
    CHECK(weighted_singular_values(db, w).size() == 6);
    db.snapshots.setZero();
    CHECK_THROWS_AS(compute_pod_basis(db, w), NumericalError);
  }

  TEST_CASE("rank criterion") {
    Eigen::VectorXd s(5);
    s << 10.0, 1.0, 0.1, 0.01, 0.001;
    const double total = s.squaredNorm();
    for (std::size_t r = 0; r <= 5; ++r) {
      const double tail = s.tail(static_cast<Eigen::Index>(5 - r)).squaredNorm();
      CHECK(tail_ratio(s, r) == doctest::Approx(std::sqrt(tail / total)));
    }
    CHECK(select_rank(s, 0.5) == 1);
    CHECK(select_rank(s, 0.05) == 2);
    CHECK(select_rank(s, 1e-16) == 5);
    CHECK(select_rank(s, 0.99) == 1);
    std::size_t last = 0;
    for (int k = 1; k <= 16; ++k) {
      const std::size_t r = select_rank(s, std::pow(10.0, -k));
      CHECK(r >= last);
      CHECK(r >= 1);
      CHECK(r <= 5);
      CHECK(tail_ratio(s, r) < std::pow(10.0, -k) + (r == 5 ? 1.0 : 0.0));
      last = r;
    }
  }

  TEST_CASE("projection and reconstruction") {
    const Grid g;
    const WeightOperator w(g.mesh, g.quad, g.groups);
    std::mt19937_64 rng(12);
    const SnapshotDatabase db = random_db(g, 5, rng);
    const PodBasis b = compute_pod_basis(db, w);
    const Eigen::VectorXd x = db.snapshots.col(3);
    const Eigen::VectorXd lam = project(x, b, b.rank(), w);
    CHECK((reconstruct(lam, b) - x).norm() < 1e-12 * x.norm());
    const Eigen::VectorXd part = project(x, b, 2, w);
    CHECK(part.size() == 2);
    CHECK((part - lam.head(2)).norm() < 1e-14 * lam.norm());
    CHECK(w.inner(x, x) == doctest::Approx(lam.squaredNorm()));
  }

  TEST_CASE("grid fingerprint") {
    const Grid g;
    const GroupStructure gs({0.0, 1.0, INFINITY});
    const std::uint64_t a = grid_fingerprint(g.mesh, g.quad, gs);
    CHECK(a == grid_fingerprint(g.mesh, g.quad, gs));
    CHECK(a != grid_fingerprint(SpatialMesh({0.5, 0.25, 1.01}), g.quad, gs));
    CHECK(a != grid_fingerprint(g.mesh, AngularQuadrature::double_gauss_legendre(3), gs));
    CHECK(a != grid_fingerprint(g.mesh, g.quad, GroupStructure({0.0, 2.0, INFINITY})));
  }
}
