#include "trtrom/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "trtrom/error.hpp"

namespace trtrom {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

BoundarySpec BoundarySpec::vacuum(std::size_t groups, std::size_t angles) {
  const auto ng = static_cast<Eigen::Index>(groups);
  const auto nm = static_cast<Eigen::Index>(angles);
  return BoundarySpec{Eigen::MatrixXd::Zero(ng, nm), Eigen::MatrixXd::Zero(ng, nm)};
}

BoundarySpec BoundarySpec::planckian_left(const Material& material, std::size_t angles, double temperature) {
  BoundarySpec bc = vacuum(material.group_count(), angles);
  const Eigen::VectorXd b = material.planck_spectrum(temperature);
  for (Eigen::Index m = 0; m < bc.left.cols(); ++m) bc.left.col(m) = kTwoPi * b;
  return bc;
}

IntensityField equilibrium_intensity(const PhaseSpaceLayout& layout, const Eigen::MatrixXd& planck) {
  if (planck.rows() != static_cast<Eigen::Index>(layout.groups()) ||
      planck.cols() != static_cast<Eigen::Index>(layout.cells()))
    throw LayoutError("equilibrium_intensity: Planck table does not match layout");
  IntensityField out(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t g = 0; g < layout.groups(); ++g)
    for (std::size_t m = 0; m < layout.angles(); ++m)
      for (std::size_t i = 0; i < layout.cells(); ++i) {
        const double v = kTwoPi * planck(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(i));
        const std::size_t k = layout.index(0, i, m, g);
        out[static_cast<Eigen::Index>(k)] = v;
        out[static_cast<Eigen::Index>(k + 1)] = v;
      }
  return out;
}

ScbTransport::ScbTransport(SpatialMesh mesh, AngularQuadrature quadrature, std::size_t groups, double light_speed)
    : mesh_(std::move(mesh)),
      quad_(std::move(quadrature)),
      layout_(mesh_.cells(), quad_.size(), groups),
      c_(light_speed) {
  if (!(c_ > 0.0)) throw DomainError("ScbTransport: light speed must be positive");
}

void ScbTransport::check_field(const IntensityField& v, const char* what) const {
  if (v.size() != static_cast<Eigen::Index>(layout_.size()))
    throw LayoutError(std::string("ScbTransport: ") + what + " has length " + std::to_string(v.size()) +
                      ", layout needs " + std::to_string(layout_.size()));
}

void ScbTransport::check_material(const GroupCoefficients& material) const {
  const auto ng = static_cast<Eigen::Index>(layout_.groups());
  const auto nx = static_cast<Eigen::Index>(layout_.cells());
  if (material.opacity.rows() != ng || material.opacity.cols() != nx || material.planck.rows() != ng ||
      material.planck.cols() != nx)
    throw LayoutError("ScbTransport: group coefficient table does not match layout");
}

IntensityField ScbTransport::sweep(const GroupCoefficients& material, const IntensityField& previous, double dt,
                                   const BoundarySpec& bc, std::size_t* negative_count) const {
  check_field(previous, "previous intensity");
  check_material(material);
  if (!(dt > 0.0)) throw DomainError("scb_sweep: dt must be positive");
  const std::size_t nx = layout_.cells();
  const double inv_cdt = 1.0 / (c_ * dt);
  IntensityField out(previous.size());
  std::size_t negatives = 0;

  for (std::size_t g = 0; g < layout_.groups(); ++g) {
    const auto ge = static_cast<Eigen::Index>(g);
    for (std::size_t m = 0; m < layout_.angles(); ++m) {
      const double mu = quad_.mu(m);
      const double a = std::abs(mu);
      const Eigen::Index base = static_cast<Eigen::Index>(layout_.block(m, g));
      double upstream = mu > 0.0 ? bc.left(ge, static_cast<Eigen::Index>(m))
                                 : bc.right(ge, static_cast<Eigen::Index>(m));
      for (std::size_t step = 0; step < nx; ++step) {
        const std::size_t i = mu > 0.0 ? step : nx - 1 - step;
        const auto ie = static_cast<Eigen::Index>(i);
        const double h = mesh_.width(i);
        const double sigma = material.opacity(ge, ie) + inv_cdt;
        const double emission = kTwoPi * material.opacity(ge, ie) * material.planck(ge, ie);
        const Eigen::Index kl = base + 2 * ie;
        const double q_left = emission + inv_cdt * previous[kl];
        const double q_right = emission + inv_cdt * previous[kl + 1];
        // Upwind corner "u" receives the incoming edge, downstream corner "d"
        // feeds the outgoing edge:
        //   (a/h)(I_u + I_d) - (2a/h) I_in + sigma I_u = q_u
        //   (a/h)(I_d - I_u)               + sigma I_d = q_d
        const double q_u = mu > 0.0 ? q_left : q_right;
        const double q_d = mu > 0.0 ? q_right : q_left;
        const double s = a / h;
        const double a11 = s + sigma;
        const double a12 = s;
        const double a21 = -s;
        const double a22 = s + sigma;
        const double r1 = q_u + 2.0 * s * upstream;
        const double r2 = q_d;
        const double det = a11 * a22 - a12 * a21;
        if (!(det > 0.0)) throw NumericalError("scb_sweep: singular corner system");
        const double i_u = (r1 * a22 - a12 * r2) / det;
        const double i_d = (a11 * r2 - a21 * r1) / det;
        if (!std::isfinite(i_u) || !std::isfinite(i_d))
          throw NumericalError("scb_sweep: non-finite intensity in group " + std::to_string(g) + ", cell " +
                               std::to_string(i));
        out[kl] = mu > 0.0 ? i_u : i_d;
        out[kl + 1] = mu > 0.0 ? i_d : i_u;
        negatives += static_cast<std::size_t>(i_u < 0.0) + static_cast<std::size_t>(i_d < 0.0);
        upstream = i_d;
      }
    }
  }
  if (negative_count != nullptr) *negative_count = negatives;
  return out;
}

IntensityField ScbTransport::apply_streaming(const IntensityField& intensity) const {
  check_field(intensity, "intensity");
  const std::size_t nx = layout_.cells();
  IntensityField out(intensity.size());
  for (std::size_t g = 0; g < layout_.groups(); ++g) {
    for (std::size_t m = 0; m < layout_.angles(); ++m) {
      const double mu = quad_.mu(m);
      const Eigen::Index base = static_cast<Eigen::Index>(layout_.block(m, g));
      for (std::size_t i = 0; i < nx; ++i) {
        const Eigen::Index kl = base + 2 * static_cast<Eigen::Index>(i);
        const double il = intensity[kl];
        const double ir = intensity[kl + 1];
        const double mid = 0.5 * (il + ir);
        const double scale = 2.0 * mu / mesh_.width(i);
        if (mu > 0.0) {
          const double left_edge = i == 0 ? 0.0 : intensity[kl - 1];
          out[kl] = scale * (mid - left_edge);
          out[kl + 1] = scale * (ir - mid);
        } else {
          const double right_edge = i + 1 == nx ? 0.0 : intensity[kl + 2];
          out[kl] = scale * (mid - il);
          out[kl + 1] = scale * (right_edge - mid);
        }
      }
    }
  }
  return out;
}

IntensityField ScbTransport::apply_removal(const Eigen::MatrixXd& opacity, const IntensityField& intensity) const {
  check_field(intensity, "intensity");
  if (opacity.rows() != static_cast<Eigen::Index>(layout_.groups()) ||
      opacity.cols() != static_cast<Eigen::Index>(layout_.cells()))
    throw LayoutError("apply_removal: opacity table does not match layout");
  IntensityField out(intensity.size());
  for (Eigen::Index k = 0; k < intensity.size(); ++k) {
    const auto c = layout_.coord(static_cast<std::size_t>(k));
    out[k] = opacity(static_cast<Eigen::Index>(c.group), static_cast<Eigen::Index>(c.cell)) * intensity[k];
  }
  return out;
}

IntensityField ScbTransport::assemble_inflow(const BoundarySpec& bc) const {
  const std::size_t nx = layout_.cells();
  IntensityField out = IntensityField::Zero(static_cast<Eigen::Index>(layout_.size()));
  for (std::size_t g = 0; g < layout_.groups(); ++g) {
    const auto ge = static_cast<Eigen::Index>(g);
    for (std::size_t m = 0; m < layout_.angles(); ++m) {
      const double mu = quad_.mu(m);
      const auto me = static_cast<Eigen::Index>(m);
      if (mu > 0.0) {
        out[static_cast<Eigen::Index>(layout_.index(0, 0, m, g))] = 2.0 * mu / mesh_.width(0) * bc.left(ge, me);
      } else {
        out[static_cast<Eigen::Index>(layout_.index(1, nx - 1, m, g))] =
            -2.0 * mu / mesh_.width(nx - 1) * bc.right(ge, me);
      }
    }
  }
  return out;
}

IntensityField ScbTransport::assemble_source(const GroupCoefficients& material, const BoundarySpec& bc) const {
  check_material(material);
  IntensityField out = assemble_inflow(bc);
  for (std::size_t g = 0; g < layout_.groups(); ++g)
    for (std::size_t m = 0; m < layout_.angles(); ++m)
      for (std::size_t i = 0; i < layout_.cells(); ++i) {
        const auto ge = static_cast<Eigen::Index>(g);
        const auto ie = static_cast<Eigen::Index>(i);
        const double q = kTwoPi * material.opacity(ge, ie) * material.planck(ge, ie);
        const auto k = static_cast<Eigen::Index>(layout_.index(0, i, m, g));
        out[k] += q;
        out[k + 1] += q;
      }
  return out;
}

IntensityField ScbTransport::residual(const IntensityField& intensity, const IntensityField& previous,
                                      const GroupCoefficients& material, double dt, const BoundarySpec& bc) const {
  check_field(previous, "previous intensity");
  return (intensity - previous) / (c_ * dt) + apply_streaming(intensity) +
         apply_removal(material.opacity, intensity) - assemble_source(material, bc);
}

double ScbTransport::edge_intensity(const IntensityField& intensity, const BoundarySpec& bc, std::size_t face,
                                    std::size_t angle, std::size_t group) const {
  const std::size_t nx = layout_.cells();
  const double mu = quad_.mu(angle);
  const auto ge = static_cast<Eigen::Index>(group);
  const auto me = static_cast<Eigen::Index>(angle);
  if (mu > 0.0) {
    if (face == 0) return bc.left(ge, me);
    return intensity[static_cast<Eigen::Index>(layout_.index(1, face - 1, angle, group))];
  }
  if (face == nx) return bc.right(ge, me);
  return intensity[static_cast<Eigen::Index>(layout_.index(0, face, angle, group))];
}

double ScbTransport::energy_balance_residual(const IntensityField& intensity, const IntensityField& previous,
                                             const GroupCoefficients& material, double dt,
                                             const BoundarySpec& bc) const {
  check_field(intensity, "intensity");
  check_field(previous, "previous intensity");
  check_material(material);
  const std::size_t nx = layout_.cells();
  double rate = 0.0;
  double absorption = 0.0;
  double emission = 0.0;
  double leakage = 0.0;
  for (std::size_t g = 0; g < layout_.groups(); ++g) {
    const auto ge = static_cast<Eigen::Index>(g);
    for (std::size_t m = 0; m < layout_.angles(); ++m) {
      const double w = quad_.weight(m);
      leakage += w * quad_.mu(m) *
                 (edge_intensity(intensity, bc, nx, m, g) - edge_intensity(intensity, bc, 0, m, g));
      for (std::size_t i = 0; i < nx; ++i) {
        const auto ie = static_cast<Eigen::Index>(i);
        const double vol = 0.5 * mesh_.width(i) * w;
        const auto k = static_cast<Eigen::Index>(layout_.index(0, i, m, g));
        const double sum_now = intensity[k] + intensity[k + 1];
        const double sum_prev = previous[k] + previous[k + 1];
        rate += vol * (sum_now - sum_prev) / (c_ * dt);
        absorption += vol * material.opacity(ge, ie) * sum_now;
        emission += vol * 2.0 * kTwoPi * material.opacity(ge, ie) * material.planck(ge, ie);
      }
    }
  }
  const double imbalance = rate + leakage - (emission - absorption);
  const double scale = std::max({std::abs(rate), std::abs(leakage), std::abs(emission), std::abs(absorption)});
  return scale > 0.0 ? std::abs(imbalance) / scale : 0.0;
}

}  // namespace trtrom
