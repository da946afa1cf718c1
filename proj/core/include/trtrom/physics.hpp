#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace trtrom {

/// Radiation constant a_R in GJ cm^-3 keV^-4 derived from the CODATA 2018
/// exact values of h, c, k and e.
double codata_radiation_constant();

/// Speed of light and radiation constant in the cm / ns / keV / GJ unit system.
struct PhysConstants {
  double c = 29.9792458;  // cm/ns
  double a_rad = codata_radiation_constant();
};

/// Photon-energy group boundaries in keV. The last boundary may be +infinity.
class GroupStructure {
 public:
  explicit GroupStructure(std::vector<double> boundaries);

  /// Edges {0, log-spaced first..last (count - 1 intervals), +inf}, giving
  /// `count` groups in total.
  static GroupStructure log_spaced(std::size_t count, double first, double last);
  static GroupStructure fleck_cummings();

  std::size_t size() const { return boundaries_.size() - 1; }
  double lower(std::size_t g) const { return boundaries_[g]; }
  double upper(std::size_t g) const { return boundaries_[g + 1]; }
  bool semi_infinite(std::size_t g) const;
  const std::vector<double>& boundaries() const { return boundaries_; }

 private:
  std::vector<double> boundaries_;
};

/// kappa_nu = coefficient / (h nu)^3 * (1 - exp(-h nu / T)), cm^-1.
struct OpacityModel {
  double coefficient = 27.0;

  double spectral(double hnu, double temperature) const;
};

/// Linear equation of state eps = c_v T.
struct MaterialEos {
  double cv = 0.0;

  double energy(double temperature) const;
  double temperature(double energy) const;
};

/// Integral of u^3 / (e^u - 1) over [0, x].
double planck_integral(double x);
/// Integral of u^3 / (e^u - 1) over [x, inf). Accurate for large x.
double planck_tail(double x);
/// Normalized Planck fraction over [x_lo, x_hi]; x_hi may be +inf.
double planck_fraction(double x_lo, double x_hi);

/// Group-integrated Planck intensity B_g(T) normalized so that
/// sum_g 4 pi B_g = c a_R T^4 over a structure spanning (0, inf).
double planck_group(const PhysConstants& constants, const GroupStructure& groups,
                    double temperature, std::size_t g);

/// Gauss-Legendre nodes of one group for the Planck-weighted opacity
/// average; the semi-infinite group is mapped through hnu = lower / u.
struct OpacityNodes {
  std::array<double, 16> hnu{};
  std::array<double, 16> hnu3{};
  std::array<double, 16> weight{};

  static OpacityNodes build(const GroupStructure& groups, std::size_t g);
  double average(const OpacityModel& opacity, double temperature) const;
};

/// Planck-weighted group-averaged opacity (16-point Gauss-Legendre per group).
double group_opacity(const OpacityModel& opacity, const GroupStructure& groups,
                     double temperature, std::size_t g);

/// Per-(group, cell) opacities and Planck functions at a temperature field.
struct GroupCoefficients {
  Eigen::MatrixXd opacity;  // Ng x Nx
  Eigen::MatrixXd planck;   // Ng x Nx
};

/// Bundles constants, spectrum and EOS; evaluates group data on a T field.
class Material {
 public:
  Material(PhysConstants constants, GroupStructure groups, OpacityModel opacity, MaterialEos eos);

  GroupCoefficients evaluate(const Eigen::VectorXd& temperature) const;
  Eigen::VectorXd planck_spectrum(double temperature) const;

  const PhysConstants& constants() const { return constants_; }
  const GroupStructure& groups() const { return groups_; }
  const OpacityModel& opacity() const { return opacity_; }
  const MaterialEos& eos() const { return eos_; }
  std::size_t group_count() const { return groups_.size(); }

 private:
  PhysConstants constants_;
  GroupStructure groups_;
  OpacityModel opacity_;
  MaterialEos eos_;
  std::vector<OpacityNodes> nodes_;
};

}  // namespace trtrom
