#include "trtrom/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "trtrom/error.hpp"

namespace trtrom {

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: need at least one node");
  if (n == 1) return QuadratureRule{{0.0}, {2.0}};
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t k = 0; k < half; ++k) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        const double p2 = ((2.0 * jd - 1.0) * x * p1 - (jd - 1.0) * p0) / jd;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[k] = -x;
    rule.nodes[n - 1 - k] = x;
    rule.weights[k] = w;
    rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

SpatialMesh::SpatialMesh(std::vector<double> widths) : widths_(std::move(widths)) {
  if (widths_.empty()) throw DomainError("SpatialMesh: no cells");
  edges_.assign(widths_.size() + 1, 0.0);
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (!(widths_[i] > 0.0)) throw DomainError("SpatialMesh: cell width must be positive");
    edges_[i + 1] = edges_[i] + widths_[i];
  }
  length_ = edges_.back();
}

SpatialMesh SpatialMesh::uniform(double length, std::size_t cells) {
  if (!(length > 0.0) || cells == 0) throw DomainError("SpatialMesh::uniform: bad length or cell count");
  return SpatialMesh(std::vector<double>(cells, length / static_cast<double>(cells)));
}

AngularQuadrature::AngularQuadrature(std::vector<double> mu, std::vector<double> weights)
    : mu_(std::move(mu)), weights_(std::move(weights)) {
  if (mu_.empty() || mu_.size() != weights_.size() || mu_.size() % 2 != 0)
    throw DomainError("AngularQuadrature: need an even, matching number of nodes and weights");
  for (std::size_t m = 0; m < mu_.size(); ++m) {
    if (!(weights_[m] > 0.0)) throw DomainError("AngularQuadrature: weights must be positive");
    if (mu_[m] == 0.0 || std::abs(mu_[m]) >= 1.0)
      throw DomainError("AngularQuadrature: nodes must lie in (-1,1) without 0");
    if (m > 0 && !(mu_[m] > mu_[m - 1])) throw DomainError("AngularQuadrature: nodes must ascend");
  }
}

AngularQuadrature AngularQuadrature::double_gauss_legendre(std::size_t n_per_half) {
  const QuadratureRule gl = gauss_legendre(n_per_half);
  std::vector<double> mu(2 * n_per_half);
  std::vector<double> w(2 * n_per_half);
  for (std::size_t k = 0; k < n_per_half; ++k) {
    // [0,1] half: mu = (1 + x)/2, w/2. Mirror for the negative half.
    const double m = 0.5 * (1.0 + gl.nodes[k]);
    mu[n_per_half + k] = m;
    w[n_per_half + k] = 0.5 * gl.weights[k];
    mu[n_per_half - 1 - k] = -m;
    w[n_per_half - 1 - k] = 0.5 * gl.weights[k];
  }
  return AngularQuadrature(std::move(mu), std::move(w));
}

TimeGrid::TimeGrid(std::vector<double> steps, std::vector<double> stage_bounds) : dt_(std::move(steps)) {
  if (dt_.empty()) throw DomainError("TimeGrid: no time steps");
  times_.assign(dt_.size() + 1, 0.0);
  for (std::size_t n = 0; n < dt_.size(); ++n) {
    if (!(dt_[n] > 0.0)) throw DomainError("TimeGrid: time steps must be positive");
    times_[n + 1] = times_[n] + dt_[n];
  }
  std::sort(stage_bounds.begin(), stage_bounds.end());
  constexpr double kSnap = 1e-12;
  for (double b : stage_bounds) {
    if (b >= times_.back() - kSnap) continue;
    if (b <= kSnap) throw DomainError("TimeGrid: stage boundary must be inside (0, t_end)");
    const auto it = std::min_element(times_.begin(), times_.end(), [b](double x, double y) {
      return std::abs(x - b) < std::abs(y - b);
    });
    if (std::abs(*it - b) > kSnap)
      throw DomainError("TimeGrid: stage boundary " + std::to_string(b) + " is not on a time-step edge");
    const auto n = static_cast<std::size_t>(it - times_.begin());
    if (!stage_last_step_.empty() && stage_last_step_.back() == n)
      throw DomainError("TimeGrid: duplicate stage boundary");
    stage_last_step_.push_back(n);
  }
  stage_last_step_.push_back(dt_.size());
}

TimeGrid TimeGrid::uniform(double dt, double t_end, std::vector<double> stage_bounds) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw DomainError("TimeGrid::uniform: dt and t_end must be positive");
  const double ratio = t_end / dt;
  const auto n = static_cast<std::size_t>(std::llround(ratio));
  if (n == 0 || std::abs(static_cast<double>(n) * dt - t_end) > 1e-9 * t_end)
    throw DomainError("TimeGrid::uniform: t_end is not a multiple of dt");
  return TimeGrid(std::vector<double>(n, dt), std::move(stage_bounds));
}

std::size_t TimeGrid::stage_of_step(std::size_t n) const {
  if (n == 0 || n > steps()) throw LayoutError("TimeGrid: step out of range");
  for (std::size_t s = 0; s < stage_last_step_.size(); ++s)
    if (n <= stage_last_step_[s]) return s;
  return stage_last_step_.size() - 1;
}

std::size_t TimeGrid::first_step(std::size_t stage) const {
  return stage == 0 ? 1 : stage_last_step_.at(stage - 1) + 1;
}

std::size_t TimeGrid::steps_in_stage(std::size_t stage) const {
  return last_step(stage) - first_step(stage) + 1;
}

PhaseSpaceLayout::PhaseSpaceLayout(std::size_t cells, std::size_t angles, std::size_t groups)
    : nx_(cells), nmu_(angles), ng_(groups) {
  if (nx_ == 0 || nmu_ == 0 || ng_ == 0) throw LayoutError("PhaseSpaceLayout: empty dimension");
}

std::size_t PhaseSpaceLayout::index(std::size_t corner, std::size_t cell, std::size_t angle,
                                    std::size_t group) const {
  if (corner >= kCorners || cell >= nx_ || angle >= nmu_ || group >= ng_)
    throw LayoutError("PhaseSpaceLayout::index: tuple out of range");
  return ((group * nmu_ + angle) * nx_ + cell) * kCorners + corner;
}

PhaseSpaceLayout::Coord PhaseSpaceLayout::coord(std::size_t index) const {
  if (index >= size()) throw LayoutError("PhaseSpaceLayout::coord: index out of range");
  Coord c{};
  c.corner = index % kCorners;
  index /= kCorners;
  c.cell = index % nx_;
  index /= nx_;
  c.angle = index % nmu_;
  c.group = index / nmu_;
  return c;
}

}  // namespace trtrom
