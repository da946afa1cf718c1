#include "trtrom/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trtrom/error.hpp"

namespace trtrom {

namespace {

struct MuRange {
  double min_sq = 1.0;
  double max_sq = 0.0;
  double min_abs = 1.0;
  double max_abs = 0.0;
};

MuRange mu_range(const AngularQuadrature& quad) {
  MuRange r;
  for (double mu : quad.nodes()) {
    r.min_sq = std::min(r.min_sq, mu * mu);
    r.max_sq = std::max(r.max_sq, mu * mu);
    r.min_abs = std::min(r.min_abs, std::abs(mu));
    r.max_abs = std::max(r.max_abs, std::abs(mu));
  }
  return r;
}

double clamp_counted(double v, double lo, double hi, std::size_t& violations) {
  if (v < lo) {
    ++violations;
    return lo;
  }
  if (v > hi) {
    ++violations;
    return hi;
  }
  return v;
}

}  // namespace

BoundaryInflow BoundaryInflow::from(const ScbTransport& transport, const BoundarySpec& bc) {
  const auto& layout = transport.layout();
  const auto& quad = transport.quadrature();
  const auto ng = static_cast<Eigen::Index>(layout.groups());
  BoundaryInflow in{Eigen::MatrixXd::Zero(ng, 2), Eigen::MatrixXd::Zero(ng, 2)};
  for (Eigen::Index g = 0; g < ng; ++g)
    for (std::size_t m = 0; m < quad.size(); ++m) {
      const double mu = quad.mu(m);
      const double w = quad.weight(m);
      const auto me = static_cast<Eigen::Index>(m);
      const double v = mu > 0.0 ? bc.left(g, me) : bc.right(g, me);
      const Eigen::Index col = mu > 0.0 ? 0 : 1;
      in.energy(g, col) += w * v / transport.light_speed();
      in.flux(g, col) += w * mu * v;
    }
  return in;
}

void compute_group_moments(const ScbTransport& transport, const IntensityField& intensity, const BoundarySpec& bc,
                           MomentFields& out) {
  const auto& layout = transport.layout();
  const auto& quad = transport.quadrature();
  if (intensity.size() != static_cast<Eigen::Index>(layout.size()))
    throw LayoutError("compute_group_moments: intensity length does not match layout");
  const std::size_t nx = layout.cells();
  const auto ng = static_cast<Eigen::Index>(layout.groups());
  const double c = transport.light_speed();
  out.energy = Eigen::MatrixXd::Zero(ng, static_cast<Eigen::Index>(nx));
  out.flux = Eigen::MatrixXd::Zero(ng, static_cast<Eigen::Index>(nx + 1));
  for (std::size_t g = 0; g < layout.groups(); ++g) {
    const auto ge = static_cast<Eigen::Index>(g);
    for (std::size_t m = 0; m < quad.size(); ++m) {
      const double w = quad.weight(m);
      const double mu = quad.mu(m);
      const auto base = static_cast<Eigen::Index>(layout.block(m, g));
      for (std::size_t i = 0; i < nx; ++i) {
        const Eigen::Index k = base + 2 * static_cast<Eigen::Index>(i);
        out.energy(ge, static_cast<Eigen::Index>(i)) += w * 0.5 * (intensity[k] + intensity[k + 1]) / c;
      }
      for (std::size_t f = 0; f <= nx; ++f)
        out.flux(ge, static_cast<Eigen::Index>(f)) += w * mu * transport.edge_intensity(intensity, bc, f, m, g);
    }
  }
}

Eigen::MatrixXd eddington_factor(const ScbTransport& transport, const IntensityField& intensity,
                                 std::size_t* violations) {
  const auto& layout = transport.layout();
  const auto& quad = transport.quadrature();
  if (intensity.size() != static_cast<Eigen::Index>(layout.size()))
    throw LayoutError("eddington_factor: intensity length does not match layout");
  const MuRange range = mu_range(quad);
  const std::size_t nx = layout.cells();
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(layout.groups()), static_cast<Eigen::Index>(nx));
  Eigen::MatrixXd den = num;
  Eigen::MatrixXd ref = num;
  // f = 1/3 + sum w (mu^2 - 1/3)(I_m - I_0) / sum w I_m, using exactness of the rule for mu^2
  for (std::size_t g = 0; g < layout.groups(); ++g)
    for (std::size_t m = 0; m < quad.size(); ++m) {
      const double w = quad.weight(m);
      const double dev = w * (quad.mu(m) * quad.mu(m) - 1.0 / 3.0);
      const auto base = static_cast<Eigen::Index>(layout.block(m, g));
      for (std::size_t i = 0; i < nx; ++i) {
        const Eigen::Index k = base + 2 * static_cast<Eigen::Index>(i);
        const auto ge = static_cast<Eigen::Index>(g);
        const auto ie = static_cast<Eigen::Index>(i);
        const double avg = 0.5 * (intensity[k] + intensity[k + 1]);
        if (m == 0) ref(ge, ie) = avg;
        num(ge, ie) += dev * (avg - ref(ge, ie));
        den(ge, ie) += w * avg;
      }
    }
  std::size_t bad = 0;
  Eigen::MatrixXd f(num.rows(), num.cols());
  for (Eigen::Index g = 0; g < f.rows(); ++g)
    for (Eigen::Index i = 0; i < f.cols(); ++i)
      f(g, i) = den(g, i) > 0.0 ? clamp_counted(1.0 / 3.0 + num(g, i) / den(g, i), range.min_sq, range.max_sq, bad)
                                : 1.0 / 3.0;
  if (violations != nullptr) *violations += bad;
  return f;
}

Eigen::VectorXd boundary_factor(const ScbTransport& transport, const IntensityField& intensity, const BoundarySpec& bc,
                                Side side) {
  const auto& layout = transport.layout();
  const auto& quad = transport.quadrature();
  const std::size_t face = side == Side::kLeft ? 0 : layout.cells();
  const double marshak = side == Side::kLeft ? 0.5 : -0.5;
  Eigen::VectorXd out(static_cast<Eigen::Index>(layout.groups()));
  for (std::size_t g = 0; g < layout.groups(); ++g) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t m = 0; m < quad.size(); ++m) {
      const double v = transport.edge_intensity(intensity, bc, face, m, g);
      num += quad.weight(m) * quad.mu(m) * v;
      den += quad.weight(m) * v;
    }
    out[static_cast<Eigen::Index>(g)] = den != 0.0 ? num / den : marshak;
  }
  return out;
}

MomentFields compute_moments(const ScbTransport& transport, const IntensityField& intensity, const BoundarySpec& bc) {
  MomentFields out;
  compute_group_moments(transport, intensity, bc, out);
  out.eddington = eddington_factor(transport, intensity, &out.closure_violations);

  const auto& layout = transport.layout();
  const auto& quad = transport.quadrature();
  const MuRange range = mu_range(quad);
  const auto ng = static_cast<Eigen::Index>(layout.groups());
  out.boundary_eddington.resize(ng, 2);
  out.boundary_factor.resize(ng, 2);
  out.outgoing_factor.resize(ng, 2);
  out.boundary_factor.col(0) = boundary_factor(transport, intensity, bc, Side::kLeft);
  out.boundary_factor.col(1) = boundary_factor(transport, intensity, bc, Side::kRight);

  for (int s = 0; s < 2; ++s) {
    const std::size_t face = s == 0 ? 0 : layout.cells();
    // Outgoing directions: mu < 0 on the left face, mu > 0 on the right face.
    const double sign = s == 0 ? -1.0 : 1.0;
    for (std::size_t g = 0; g < layout.groups(); ++g) {
      double e = 0.0;
      double p = 0.0;
      double out_f = 0.0;
      double out_e = 0.0;
      const double v0 = transport.edge_intensity(intensity, bc, face, 0, g);
      for (std::size_t m = 0; m < quad.size(); ++m) {
        const double mu = quad.mu(m);
        const double w = quad.weight(m);
        const double v = transport.edge_intensity(intensity, bc, face, m, g);
        e += w * v;
        p += w * (mu * mu - 1.0 / 3.0) * (v - v0);
        if (mu * sign > 0.0) {
          out_f += w * mu * v;
          out_e += w * v;
        }
      }
      const auto ge = static_cast<Eigen::Index>(g);
      out.boundary_eddington(ge, s) =
          e > 0.0 ? clamp_counted(1.0 / 3.0 + p / e, range.min_sq, range.max_sq, out.closure_violations) : 1.0 / 3.0;
      if (out_e > 0.0) {
        const double ratio = std::abs(out_f / out_e);
        out.outgoing_factor(ge, s) =
            sign * clamp_counted(ratio, range.min_abs, range.max_abs, out.closure_violations);
        if (out_f * sign < 0.0) ++out.closure_violations;
      } else {
        out.outgoing_factor(ge, s) = sign * 0.5;
      }
    }
  }
  return out;
}

GreyCoefficients grey_coefficients(const Eigen::MatrixXd& energy, const Eigen::MatrixXd& flux,
                                   const Eigen::MatrixXd& eddington, const Eigen::MatrixXd& opacity,
                                   const Eigen::MatrixXd& planck, const Eigen::MatrixXd& face_opacity) {
  const Eigen::Index ng = energy.rows();
  const Eigen::Index nx = energy.cols();
  if (flux.rows() != ng || flux.cols() != nx + 1 || eddington.rows() != ng || eddington.cols() != nx ||
      opacity.rows() != ng || opacity.cols() != nx || planck.rows() != ng || planck.cols() != nx ||
      face_opacity.rows() != ng || face_opacity.cols() != nx + 1)
    throw LayoutError("grey_coefficients: inconsistent table shapes");

  GreyCoefficients out;
  out.kappa_e.resize(nx);
  out.kappa_b.resize(nx);
  out.eddington.resize(nx);
  out.kappa_r.resize(nx + 1);
  out.eta.resize(nx + 1);
  Eigen::VectorXd total(nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double e = energy.col(i).sum();
    if (!(e > 0.0))
      throw NumericalError("grey_coefficients: total radiation energy is not positive in cell " + std::to_string(i));
    total[i] = e;
    out.kappa_e[i] = opacity.col(i).dot(energy.col(i)) / e;
    out.eddington[i] = eddington.col(i).dot(energy.col(i)) / e;
    const double b = planck.col(i).sum();
    out.kappa_b[i] = b > 0.0 ? opacity.col(i).dot(planck.col(i)) / b : out.kappa_e[i];
  }
  for (Eigen::Index f = 0; f <= nx; ++f) {
    const double e_face = f == 0 ? total[0] : f == nx ? total[nx - 1] : 0.5 * (total[f - 1] + total[f]);
    const double abs_flux = flux.col(f).cwiseAbs().sum();
    double kr = 0.0;
    if (abs_flux > 0.0) {
      kr = face_opacity.col(f).dot(flux.col(f).cwiseAbs()) / abs_flux;
    } else {
      // kappa_E interpolated to the face
      kr = f == 0 ? out.kappa_e[0] : f == nx ? out.kappa_e[nx - 1] : 0.5 * (out.kappa_e[f - 1] + out.kappa_e[f]);
    }
    out.kappa_r[f] = kr;
    out.eta[f] = (face_opacity.col(f).array() - kr).matrix().dot(flux.col(f)) / e_face;
  }
  return out;
}

}  // namespace trtrom
