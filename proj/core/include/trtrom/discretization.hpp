#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace trtrom {

/// Gauss-Legendre rule on [-1, 1]; nodes ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(std::size_t n);

/// 1D slab mesh described by its cell widths (cm).
class SpatialMesh {
 public:
  explicit SpatialMesh(std::vector<double> widths);
  static SpatialMesh uniform(double length, std::size_t cells);

  std::size_t cells() const { return widths_.size(); }
  double width(std::size_t i) const { return widths_[i]; }
  const std::vector<double>& widths() const { return widths_; }
  double length() const { return length_; }
  double center(std::size_t i) const { return edges_[i] + 0.5 * widths_[i]; }
  double edge(std::size_t f) const { return edges_[f]; }

 private:
  std::vector<double> widths_;
  std::vector<double> edges_;
  double length_ = 0.0;
};

/// Discrete ordinates set: nodes in (-1, 1) \ {0}, ascending, symmetric.
class AngularQuadrature {
 public:
  AngularQuadrature(std::vector<double> mu, std::vector<double> weights);

  /// n-point Gauss-Legendre applied separately on [-1, 0] and [0, 1].
  static AngularQuadrature double_gauss_legendre(std::size_t n_per_half);

  std::size_t size() const { return mu_.size(); }
  double mu(std::size_t m) const { return mu_[m]; }
  double weight(std::size_t m) const { return weights_[m]; }
  const std::vector<double>& nodes() const { return mu_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> mu_;
  std::vector<double> weights_;
};

/// Backward-Euler step sizes and the partition of [0, t_end] into stages.
/// Step n (1-based) spans (t^{n-1}, t^n]; it belongs to the stage whose
/// window contains t^n.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> steps, std::vector<double> stage_bounds);
  static TimeGrid uniform(double dt, double t_end, std::vector<double> stage_bounds);

  std::size_t steps() const { return dt_.size(); }
  double dt(std::size_t n) const { return dt_[n - 1]; }
  const std::vector<double>& step_sizes() const { return dt_; }
  double time(std::size_t n) const { return times_[n]; }
  double end_time() const { return times_.back(); }

  std::size_t stage_count() const { return stage_last_step_.size(); }
  /// 0-based stage of step n (1-based).
  std::size_t stage_of_step(std::size_t n) const;
  std::size_t first_step(std::size_t stage) const;
  std::size_t last_step(std::size_t stage) const { return stage_last_step_[stage]; }
  std::size_t steps_in_stage(std::size_t stage) const;
  double stage_begin(std::size_t stage) const { return time(first_step(stage) - 1); }
  double stage_end(std::size_t stage) const { return time(last_step(stage)); }

 private:
  std::vector<double> dt_;
  std::vector<double> times_;
  std::vector<std::size_t> stage_last_step_;
};

/// Flat (corner, cell, angle, group) <-> index map, group-major:
/// index = ((group * Nmu + angle) * Nx + cell) * 2 + corner.
class PhaseSpaceLayout {
 public:
  static constexpr std::size_t kCorners = 2;

  struct Coord {
    std::size_t corner;
    std::size_t cell;
    std::size_t angle;
    std::size_t group;
    bool operator==(const Coord&) const = default;
  };

  PhaseSpaceLayout(std::size_t cells, std::size_t angles, std::size_t groups);

  std::size_t cells() const { return nx_; }
  std::size_t angles() const { return nmu_; }
  std::size_t groups() const { return ng_; }
  std::size_t size() const { return kCorners * nx_ * nmu_ * ng_; }

  std::size_t index(std::size_t corner, std::size_t cell, std::size_t angle, std::size_t group) const;
  Coord coord(std::size_t index) const;

  /// Offset of the contiguous (group, angle) block of 2 Nx entries.
  std::size_t block(std::size_t angle, std::size_t group) const {
    return (group * nmu_ + angle) * nx_ * kCorners;
  }

  bool operator==(const PhaseSpaceLayout&) const = default;

 private:
  std::size_t nx_;
  std::size_t nmu_;
  std::size_t ng_;
};

}  // namespace trtrom
