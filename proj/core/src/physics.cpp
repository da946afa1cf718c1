#include "trtrom/physics.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <cmath>
#include <limits>
#include <numbers>

#include "trtrom/discretization.hpp"
#include "trtrom/error.hpp"

namespace trtrom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPlanckTotal = kPi * kPi * kPi * kPi / 15.0;
constexpr double kSeriesTolerance = 1e-17;
// Below this x the Bernoulli expansion is used, above it the exponential tail.
constexpr double kSeriesSwitch = 2.0;

// B_{2k} / (2k)! for k = 1..20.
constexpr std::array<double, 20> kBernoulliOverFactorial = {
    8.3333333333333333333e-2,   -1.3888888888888888889e-3, 3.3068783068783068783e-5,
    -8.2671957671957671958e-7,  2.0876756987868098979e-8,  -5.2841901386874931848e-10,
    1.3382536530684678833e-11,  -3.3896802963225828668e-13, 8.5860620562778445641e-15,
    -2.174868698558061873e-16,  5.5090028283602295152e-18, -1.3954464685812523341e-19,
    3.5347070396294674717e-21,  -8.9535174270375468504e-23, 2.2679524523376830603e-24,
    -5.7447906688722024453e-26, 1.4551724756148649019e-27, -3.6859949406653101782e-29,
    9.336734257095044672e-31,   -2.3650224157006299346e-32,
};

const QuadratureRule& sixteen_point_rule() {
  static const QuadratureRule rule = gauss_legendre(16);
  return rule;
}

struct PlanckEdge {
  double x = 0.0;
  double integral = 0.0;  // over [0, x]
  double tail = 0.0;      // over [x, inf)
};

PlanckEdge planck_edge(double x);

// Differences are taken between whichever representation is accurate on
// each side of the series switch.
double edge_fraction(const PlanckEdge& lo, const PlanckEdge& hi) {
  double value = 0.0;
  if (lo.x >= kSeriesSwitch) value = lo.tail - hi.tail;
  else if (hi.x <= kSeriesSwitch) value = hi.integral - lo.integral;
  else value = (kPlanckTotal - hi.tail) - lo.integral;
  return value / kPlanckTotal;
}

}  // namespace

double codata_radiation_constant() {
  // a = 8 pi^5 (1 keV)^4 / (15 h^3 c^3) in J m^-3 keV^-4, then to GJ cm^-3.
  constexpr double h = 6.62607015e-34;
  constexpr double c = 299792458.0;
  constexpr double kev = 1.602176634e-16;
  const double a = 8.0 * std::pow(kPi, 5) * std::pow(kev, 4) / (15.0 * h * h * h * c * c * c);
  return a * 1e-6 * 1e-9;
}

GroupStructure::GroupStructure(std::vector<double> boundaries) : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2) throw DomainError("GroupStructure: need at least one group");
  if (!(boundaries_.front() >= 0.0)) throw DomainError("GroupStructure: first boundary must be >= 0");
  for (std::size_t g = 1; g < boundaries_.size(); ++g) {
    if (!(boundaries_[g] > boundaries_[g - 1]))
      throw DomainError("GroupStructure: boundaries must be strictly increasing");
    if (std::isinf(boundaries_[g]) && g + 1 != boundaries_.size())
      throw DomainError("GroupStructure: only the last boundary may be infinite");
  }
}

GroupStructure GroupStructure::log_spaced(std::size_t count, double first, double last) {
  if (count < 3 || !(first > 0.0) || !(last > first))
    throw DomainError("GroupStructure::log_spaced: need count >= 3 and 0 < first < last");
  std::vector<double> b;
  b.reserve(count + 1);
  b.push_back(0.0);
  const std::size_t intervals = count - 2;
  const double ratio = std::log(last / first) / static_cast<double>(intervals);
  for (std::size_t k = 0; k <= intervals; ++k)
    b.push_back(k == intervals ? last : first * std::exp(ratio * static_cast<double>(k)));
  b.push_back(std::numeric_limits<double>::infinity());
  return GroupStructure(std::move(b));
}

GroupStructure GroupStructure::fleck_cummings() { return log_spaced(17, 0.1, 20.0); }

bool GroupStructure::semi_infinite(std::size_t g) const { return std::isinf(boundaries_.at(g + 1)); }

double OpacityModel::spectral(double hnu, double temperature) const {
  if (!(hnu > 0.0) || !(temperature > 0.0))
    throw DomainError("spectral_opacity: photon energy and temperature must be positive");
  return coefficient / (hnu * hnu * hnu) * -std::expm1(-hnu / temperature);
}

double MaterialEos::energy(double temperature) const {
  if (temperature < 0.0) throw DomainError("eos_energy: negative temperature");
  return cv * temperature;
}

double MaterialEos::temperature(double energy) const {
  if (energy < 0.0) throw DomainError("eos_temperature: negative energy density");
  return energy / cv;
}

double planck_tail(double x) {
  if (x < 0.0) throw DomainError("planck_tail: negative argument");
  if (x < kSeriesSwitch) return kPlanckTotal - planck_integral(x);
  const double x2 = x * x;
  const double x3 = x2 * x;
  const double q = std::exp(-x);
  double qk = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 10000; ++k) {
    const double kd = k;
    qk *= q;
    const double term = qk * (x3 / kd + 3.0 * x2 / (kd * kd) + 6.0 * x / (kd * kd * kd) + 6.0 / (kd * kd * kd * kd));
    sum += term;
    if (term <= kSeriesTolerance * sum) break;
  }
  return sum;
}

double planck_integral(double x) {
  if (x < 0.0) throw DomainError("planck_integral: negative argument");
  if (std::isinf(x)) return kPlanckTotal;
  if (x >= kSeriesSwitch) return kPlanckTotal - planck_tail(x);
  // u^3/(e^u-1) = u^2 (1 - u/2 + sum_k B_2k/(2k)! u^2k)
  const double x3 = x * x * x;
  double sum = x3 / 3.0 - x3 * x / 8.0;
  double power = x3;
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    power *= x * x;
    const double n = 2.0 * static_cast<double>(k + 1) + 3.0;
    const double term = kBernoulliOverFactorial[k] * power / n;
    sum += term;
    if (std::abs(term) <= 1e-17 * sum) break;
  }
  return sum;
}

namespace {

PlanckEdge planck_edge(double x) {
  if (std::isinf(x)) return {x, kPlanckTotal, 0.0};
  if (x >= kSeriesSwitch) {
    const double tail = planck_tail(x);
    return {x, kPlanckTotal - tail, tail};
  }
  const double integral = planck_integral(x);
  return {x, integral, kPlanckTotal - integral};
}

}  // namespace

double planck_fraction(double x_lo, double x_hi) {
  if (x_lo < 0.0 || !(x_hi > x_lo)) throw DomainError("planck_fraction: need 0 <= x_lo < x_hi");
  return edge_fraction(planck_edge(x_lo), planck_edge(x_hi));
}

double planck_group(const PhysConstants& constants, const GroupStructure& groups, double temperature,
                    std::size_t g) {
  if (!(temperature > 0.0)) throw DomainError("planck_group: temperature must be positive");
  const double t4 = temperature * temperature * temperature * temperature;
  const double frac = planck_fraction(groups.lower(g) / temperature, groups.upper(g) / temperature);
  return constants.c * constants.a_rad * t4 / (4.0 * kPi) * frac;
}

OpacityNodes OpacityNodes::build(const GroupStructure& groups, std::size_t g) {
  const QuadratureRule& rule = sixteen_point_rule();
  const double lo = groups.lower(g);
  const double hi = groups.upper(g);
  OpacityNodes n;
  for (std::size_t j = 0; j < n.hnu.size(); ++j) {
    const double u = 0.5 * (1.0 + rule.nodes[j]);
    if (groups.semi_infinite(g)) {
      // hnu = lo / u, u in (0, 1]
      n.hnu[j] = lo / u;
      n.weight[j] = rule.weights[j] * lo / (u * u);
    } else {
      n.hnu[j] = lo + (hi - lo) * u;
      n.weight[j] = rule.weights[j] * 0.5 * (hi - lo);
    }
    n.hnu3[j] = n.hnu[j] * n.hnu[j] * n.hnu[j];
  }
  return n;
}

double OpacityNodes::average(const OpacityModel& opacity, double temperature) const {
  // Weight hnu^3 / (e^x - 1) times kappa = C (1 - e^-x) / hnu^3, scaled by
  // e^{x_0} with x_0 the smallest node argument so cold cells do not underflow.
  const double x0 = *std::min_element(hnu.begin(), hnu.end()) / temperature;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < hnu.size(); ++j) {
    const double x = hnu[j] / temperature;
    const double e = std::exp(x0 - x);
    num += weight[j] * e;
    den += weight[j] * hnu3[j] * e / -std::expm1(-x);
  }
  return opacity.coefficient * num / den;
}

double group_opacity(const OpacityModel& opacity, const GroupStructure& groups, double temperature,
                     std::size_t g) {
  if (!(temperature > 0.0)) throw DomainError("group_opacity: temperature must be positive");
  return OpacityNodes::build(groups, g).average(opacity, temperature);
}

Material::Material(PhysConstants constants, GroupStructure groups, OpacityModel opacity, MaterialEos eos)
    : constants_(constants), groups_(std::move(groups)), opacity_(opacity), eos_(eos) {
  for (std::size_t g = 0; g < groups_.size(); ++g) nodes_.push_back(OpacityNodes::build(groups_, g));
  if (!(constants_.c > 0.0) || !(constants_.a_rad > 0.0))
    throw DomainError("Material: c and a_R must be positive");
  if (!(eos_.cv > 0.0)) throw DomainError("Material: c_v must be positive");
}

GroupCoefficients Material::evaluate(const Eigen::VectorXd& temperature) const {
  const std::size_t ng = groups_.size();
  const Eigen::Index nx = temperature.size();
  GroupCoefficients out{Eigen::MatrixXd(ng, nx), Eigen::MatrixXd(ng, nx)};
  std::vector<PlanckEdge> edges(ng + 1);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double t = temperature[i];
    if (!(t > 0.0) || !std::isfinite(t))
      throw DomainError("Material::evaluate: nonpositive or non-finite temperature in cell " + std::to_string(i));
    const double scale = constants_.c * constants_.a_rad * t * t * t * t / (4.0 * kPi);
    for (std::size_t k = 0; k <= ng; ++k) edges[k] = planck_edge(groups_.boundaries()[k] / t);
    for (std::size_t g = 0; g < ng; ++g) {
      const auto ge = static_cast<Eigen::Index>(g);
      out.opacity(ge, i) = nodes_[g].average(opacity_, t);
      out.planck(ge, i) = scale * edge_fraction(edges[g], edges[g + 1]);
    }
  }
  return out;
}

Eigen::VectorXd Material::planck_spectrum(double temperature) const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(groups_.size()));
  for (std::size_t g = 0; g < groups_.size(); ++g)
    b[static_cast<Eigen::Index>(g)] = planck_group(constants_, groups_, temperature, g);
  return b;
}

}  // namespace trtrom
