#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>

#include "nclb/core/errors.hpp"

namespace nclb {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
using Vec3d = Vec3<double>;

/// Uniform tensor grid on [-L, L]^3 with n cells per axis; nodes sit at cell
/// centres, so midpoint quadrature is a plain weighted sum.
template <typename Scalar>
class VelocityGrid {
 public:
  VelocityGrid() = default;
  VelocityGrid(Scalar extent, int n) : extent_(extent), n_(n) {
    require(n >= 8, "VelocityGrid: n >= 8");
    require(extent > Scalar(0), "VelocityGrid: extent > 0");
  }

  Scalar extent() const { return extent_; }
  int n() const { return n_; }
  Scalar spacing() const { return Scalar(2) * extent_ / Scalar(n_); }
  Scalar cell_volume() const { const Scalar h = spacing(); return h * h * h; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  Scalar coord(int i) const { return -extent_ + (Scalar(i) + Scalar(0.5)) * spacing(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }

  Vec3<Scalar> node(int i, int j, int k) const { return {coord(i), coord(j), coord(k)}; }

  Vec3<Scalar> node(std::size_t flat) const {
    const int k = static_cast<int>(flat % n_);
    const int j = static_cast<int>((flat / n_) % n_);
    const int i = static_cast<int>(flat / (static_cast<std::size_t>(n_) * n_));
    return node(i, j, k);
  }

  /// Fractional cell coordinate of a velocity component (node i sits at i).
  Scalar fractional(Scalar v) const { return (v + extent_) / spacing() - Scalar(0.5); }

  /// True for nodes in the outermost layer of the box.
  bool on_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == n_ - 1 || j == n_ - 1 || k == n_ - 1;
  }

  bool operator==(const VelocityGrid&) const = default;

 private:
  Scalar extent_ = Scalar(1);
  int n_ = 8;
};

/// Spatial grid: either the space-homogeneous marker (one point) or a 1-D
/// periodic torus of length L_x with n_x points x_j = j * L_x / n_x.
template <typename Scalar>
class SpaceGrid {
 public:
  static SpaceGrid homogeneous() { return SpaceGrid(); }
  static SpaceGrid periodic(Scalar length, int n) {
    require(length > Scalar(0), "SpaceGrid: L_x > 0");
    require(n >= 1, "SpaceGrid: n_x >= 1");
    SpaceGrid g;
    g.homogeneous_ = false;
    g.length_ = length;
    g.n_ = n;
    return g;
  }

  bool is_homogeneous() const { return homogeneous_; }
  int n() const { return n_; }
  Scalar length() const { return length_; }
  Scalar spacing() const { return length_ / Scalar(n_); }
  Scalar coord(int j) const { return homogeneous_ ? Scalar(0) : Scalar(j) * spacing(); }

  /// Shortest signed periodic separation a - b.
  Scalar separation(Scalar a, Scalar b) const {
    if (homogeneous_) return Scalar(0);
    Scalar d = std::fmod(a - b, length_);
    if (d > length_ / 2) d -= length_;
    if (d < -length_ / 2) d += length_;
    return d;
  }

  bool operator==(const SpaceGrid&) const = default;

 private:
  SpaceGrid() = default;
  bool homogeneous_ = true;
  Scalar length_ = Scalar(0);
  int n_ = 1;
};

}  // namespace nclb
