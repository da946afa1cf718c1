#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "trtrom/error.hpp"
#include "trtrom/moments.hpp"

using namespace trtrom;

namespace {

const double kC = PhysConstants{}.c;

ScbTransport make_transport(std::size_t half = 3) {
  return ScbTransport(SpatialMesh({0.2, 0.1, 0.3, 0.4}), AngularQuadrature::double_gauss_legendre(half), 3, kC);
}

Eigen::VectorXd positive_field(const ScbTransport& t, std::mt19937_64& rng) {
  return oracle::random_matrix(static_cast<Eigen::Index>(t.layout().size()), 1, rng, 0.0, 1.0).col(0);
}

}  // namespace

TEST_SUITE("moments") {
  TEST_CASE("energy density and flux from quadrature sums") {
    const ScbTransport t = make_transport();
    std::mt19937_64 rng(3);
    const Eigen::VectorXd v = positive_field(t, rng);
    const BoundarySpec bc{oracle::random_matrix(3, 6, rng, 0.0, 1.0), oracle::random_matrix(3, 6, rng, 0.0, 1.0)};
    MomentFields m;
    compute_group_moments(t, v, bc, m);
    const auto& lay = t.layout();
    const auto& q = t.quadrature();
    for (std::size_t g = 0; g < 3; ++g) {
      const auto ge = static_cast<Eigen::Index>(g);
      for (std::size_t i = 0; i < 4; ++i) {
        double e = 0.0;
        for (std::size_t a = 0; a < q.size(); ++a)
          e += q.weight(a) * 0.5 *
               (v[static_cast<Eigen::Index>(lay.index(0, i, a, g))] + v[static_cast<Eigen::Index>(lay.index(1, i, a, g))]);
        CHECK(m.energy(ge, static_cast<Eigen::Index>(i)) == doctest::Approx(e / kC).epsilon(1e-14));
      }
      for (std::size_t f = 0; f <= 4; ++f) {
        double flux = 0.0;
        for (std::size_t a = 0; a < q.size(); ++a) {
          const double mu = q.mu(a);
          double edge = 0.0;
          if (mu > 0.0)
            edge = f == 0 ? bc.left(ge, static_cast<Eigen::Index>(a)) : v[static_cast<Eigen::Index>(lay.index(1, f - 1, a, g))];
          else
            edge = f == 4 ? bc.right(ge, static_cast<Eigen::Index>(a)) : v[static_cast<Eigen::Index>(lay.index(0, f, a, g))];
          flux += q.weight(a) * mu * edge;
        }
        CHECK(m.flux(ge, static_cast<Eigen::Index>(f)) == doctest::Approx(flux).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("isotropic intensity has Eddington factor one third") {
    std::mt19937_64 rng(61);
    for (std::size_t half : {2, 4, 8}) {
      const ScbTransport t = make_transport(half);
      const Eigen::MatrixXd planck = Eigen::MatrixXd::Constant(3, 4, 0.7);
      const IntensityField iso = equilibrium_intensity(t.layout(), planck);
      std::size_t bad = 0;
      const Eigen::MatrixXd f = eddington_factor(t, iso, &bad);
      CHECK(bad == 0);
      CHECK((f.array() == 1.0 / 3.0).all());
      const Eigen::MatrixXd random_level = oracle::random_matrix(3, 4, rng, 1e-6, 1e3);
      CHECK((eddington_factor(t, equilibrium_intensity(t.layout(), random_level)).array() == 1.0 / 3.0).all());
      const MomentFields m = compute_moments(t, iso, BoundarySpec{Eigen::MatrixXd::Constant(3, 2 * half, iso[0]),
                                                                  Eigen::MatrixXd::Constant(3, 2 * half, iso[0])});
      CHECK((m.boundary_eddington.array() == 1.0 / 3.0).all());
      const Eigen::MatrixXd zero = eddington_factor(t, Eigen::VectorXd::Zero(iso.size()));
      CHECK((zero.array() == 1.0 / 3.0).all());
    }
  }

  TEST_CASE("closures stay in their physical ranges for nonnegative intensities") {
    const ScbTransport t = make_transport();
    const auto& q = t.quadrature();
    double mu2_min = 1.0, mu2_max = 0.0;
    for (double mu : q.nodes()) {
      mu2_min = std::min(mu2_min, mu * mu);
      mu2_max = std::max(mu2_max, mu * mu);
    }
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd v = positive_field(t, rng);
      const BoundarySpec bc{oracle::random_matrix(3, 6, rng, 0.0, 1.0), oracle::random_matrix(3, 6, rng, 0.0, 1.0)};
      const MomentFields m = compute_moments(t, v, bc);
      CHECK(m.closure_violations == 0);
      CHECK(m.eddington.minCoeff() >= mu2_min);
      CHECK(m.eddington.maxCoeff() <= mu2_max);
      CHECK(m.boundary_eddington.minCoeff() >= mu2_min);
      CHECK(m.boundary_eddington.maxCoeff() <= mu2_max);
      CHECK(m.boundary_factor.cwiseAbs().maxCoeff() <= 1.0);
      CHECK(m.outgoing_factor.col(0).maxCoeff() < 0.0);
      CHECK(m.outgoing_factor.col(1).minCoeff() > 0.0);
      CHECK(m.energy.minCoeff() >= 0.0);
    }
  }

  TEST_CASE("a negative intensity beyond the closure range is clamped and reported") {
    const ScbTransport t = make_transport(2);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.layout().size()));
    // only the most grazing direction, with a small negative value on the steepest one
    const auto& q = t.quadrature();
    std::size_t grazing = 0, steep = 0;
    for (std::size_t a = 0; a < q.size(); ++a) {
      if (std::abs(q.mu(a)) < std::abs(q.mu(grazing))) grazing = a;
      if (std::abs(q.mu(a)) > std::abs(q.mu(steep))) steep = a;
    }
    for (int c = 0; c < 2; ++c) {
      v[static_cast<Eigen::Index>(t.layout().index(static_cast<std::size_t>(c), 0, grazing, 0))] = 1.0;
      v[static_cast<Eigen::Index>(t.layout().index(static_cast<std::size_t>(c), 0, steep, 0))] = -0.05;
    }
    std::size_t bad = 0;
    const Eigen::MatrixXd f = eddington_factor(t, v, &bad);
    CHECK(bad == 1);
    CHECK(f(0, 0) == doctest::Approx(q.mu(grazing) * q.mu(grazing)));
  }

  TEST_CASE("boundary factor of an empty face is the Marshak value") {
    const ScbTransport t = make_transport();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.layout().size()));
    const BoundarySpec bc = BoundarySpec::vacuum(3, 6);
    CHECK((boundary_factor(t, zero, bc, Side::kLeft).array() == 0.5).all());
    CHECK((boundary_factor(t, zero, bc, Side::kRight).array() == -0.5).all());
  }

  TEST_CASE("grey coefficients are weighted means of group data") {
    std::mt19937_64 rng(5);
    const Eigen::Index ng = 6, nx = 5;
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd e = oracle::random_matrix(ng, nx, rng, 0.01, 1.0);
      const Eigen::MatrixXd f = oracle::random_matrix(ng, nx + 1, rng, -1.0, 1.0);
      const Eigen::MatrixXd edd = oracle::random_matrix(ng, nx, rng, 0.2, 0.9);
      const Eigen::MatrixXd kap = oracle::random_matrix(ng, nx, rng, 0.1, 50.0);
      const Eigen::MatrixXd b = oracle::random_matrix(ng, nx, rng, 0.0, 2.0);
      const Eigen::MatrixXd fk = oracle::random_matrix(ng, nx + 1, rng, 0.1, 50.0);
      const GreyCoefficients gc = grey_coefficients(e, f, edd, kap, b, fk);
      for (Eigen::Index i = 0; i < nx; ++i) {
        const double lo = kap.col(i).minCoeff(), hi = kap.col(i).maxCoeff();
        CHECK(gc.kappa_e[i] >= lo);
        CHECK(gc.kappa_e[i] <= hi);
        CHECK(gc.kappa_b[i] >= lo);
        CHECK(gc.kappa_b[i] <= hi);
        CHECK(gc.eddington[i] >= edd.col(i).minCoeff());
        CHECK(gc.eddington[i] <= edd.col(i).maxCoeff());
        CHECK(gc.kappa_e[i] == doctest::Approx((kap.col(i).array() * e.col(i).array()).sum() / e.col(i).sum()));
        CHECK(gc.kappa_b[i] == doctest::Approx((kap.col(i).array() * b.col(i).array()).sum() / b.col(i).sum()));
      }
      for (Eigen::Index j = 0; j <= nx; ++j) {
        CHECK(gc.kappa_r[j] >= fk.col(j).minCoeff());
        CHECK(gc.kappa_r[j] <= fk.col(j).maxCoeff());
        // kappa_R F + eta E_face reproduces sum_g kappa_g F_g
        const double ef = j == 0 ? e.col(0).sum() : j == nx ? e.col(nx - 1).sum() : 0.5 * (e.col(j - 1).sum() + e.col(j).sum());
        CHECK(gc.kappa_r[j] * f.col(j).sum() + gc.eta[j] * ef == doctest::Approx(fk.col(j).dot(f.col(j))).epsilon(1e-12));
      }
      const GreyCoefficients scaled = grey_coefficients(3.7 * e, f, edd, kap, b, fk);
      CHECK((scaled.eddington - gc.eddington).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((scaled.kappa_e - gc.kappa_e).cwiseAbs().maxCoeff() < 1e-12 * gc.kappa_e.maxCoeff());
    }
  }

  TEST_CASE("grey coefficients reject empty cells") {
    const Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
    const Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 3);
    const Eigen::MatrixXd k = Eigen::MatrixXd::Ones(2, 2);
    CHECK_THROWS_AS(grey_coefficients(e, f, k, k, k, Eigen::MatrixXd::Ones(2, 3)), NumericalError);
    CHECK_THROWS_AS(grey_coefficients(k, f, k, k, k, Eigen::MatrixXd::Ones(2, 2)), LayoutError);
  }
}
