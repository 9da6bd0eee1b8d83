#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "nclb/core/errors.hpp"
#include "nclb/core/grid.hpp"

namespace nclb {

/// Sampled distribution f(t, x, v): one velocity block of n^3 values per
/// spatial point, stored contiguously.
template <typename Scalar>
class PhaseField {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  PhaseField(SpaceGrid<Scalar> x_grid, VelocityGrid<Scalar> v_grid, Scalar time = Scalar(0))
      : x_grid_(x_grid), v_grid_(v_grid), time_(time),
        values_(Array::Zero(static_cast<Eigen::Index>(x_grid.n() * v_grid.size()))) {}

  const SpaceGrid<Scalar>& x_grid() const { return x_grid_; }
  const VelocityGrid<Scalar>& v_grid() const { return v_grid_; }
  Scalar time() const { return time_; }
  void set_time(Scalar t) { time_ = t; }

  int n_x() const { return x_grid_.n(); }
  std::size_t block_size() const { return v_grid_.size(); }

  Array& values() { return values_; }
  const Array& values() const { return values_; }

  auto block(int ix) { return values_.segment(static_cast<Eigen::Index>(ix * block_size()), block_size()); }
  auto block(int ix) const {
    return values_.segment(static_cast<Eigen::Index>(ix * block_size()), block_size());
  }

  Scalar& operator()(int ix, std::size_t iv) { return values_[static_cast<Eigen::Index>(ix * block_size() + iv)]; }
  Scalar operator()(int ix, std::size_t iv) const {
    return values_[static_cast<Eigen::Index>(ix * block_size() + iv)];
  }

  /// Fill every (x, v) node from a callable f(x, v).
  template <typename F>
  void fill(F&& f) {
    for (int ix = 0; ix < n_x(); ++ix) {
      const Scalar x = x_grid_.coord(ix);
      for (std::size_t iv = 0; iv < block_size(); ++iv) (*this)(ix, iv) = f(x, v_grid_.node(iv));
    }
  }

  /// Trilinear interpolation of the velocity block at ix; zero outside the box.
  Scalar interpolate(int ix, const Vec3<Scalar>& v) const {
    const int n = v_grid_.n();
    Scalar fr[3];
    int lo[3];
    for (int d = 0; d < 3; ++d) {
      fr[d] = v_grid_.fractional(v[d]);
      const Scalar fl = std::floor(fr[d]);
      if (fl < Scalar(-1) || fl > Scalar(n - 1)) return Scalar(0);
      lo[d] = static_cast<int>(fl);
      fr[d] -= fl;
    }
    const std::size_t base = static_cast<std::size_t>(ix) * block_size();
    Scalar acc = 0;
    for (int c = 0; c < 8; ++c) {
      const int i = lo[0] + ((c >> 2) & 1);
      const int j = lo[1] + ((c >> 1) & 1);
      const int k = lo[2] + (c & 1);
      if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) continue;
      const Scalar w = ((c >> 2) & 1 ? fr[0] : 1 - fr[0]) * ((c >> 1) & 1 ? fr[1] : 1 - fr[1]) *
                       (c & 1 ? fr[2] : 1 - fr[2]);
      acc += w * values_[static_cast<Eigen::Index>(base + v_grid_.index(i, j, k))];
    }
    return acc;
  }

  /// All values >= 0 and boundary layer below tol * max.
  void validate(Scalar decay_tol = Scalar(1e-8)) const {
    require((values_ >= Scalar(0)).all(), "PhaseField: all stored values >= 0");
    require(std::isfinite(static_cast<double>(values_.sum())), "PhaseField: values finite");
    require(boundary_ratio() <= decay_tol, "PhaseField: boundary values <= decay tolerance * max");
  }

  /// max over the outer velocity layer divided by the global max (0 for f == 0).
  Scalar boundary_ratio() const {
    const Scalar fmax = values_.size() ? values_.maxCoeff() : Scalar(0);
    if (fmax <= Scalar(0)) return Scalar(0);
    const int n = v_grid_.n();
    Scalar bmax = 0;
    for (int ix = 0; ix < n_x(); ++ix)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            if (v_grid_.on_boundary(i, j, k)) bmax = std::max(bmax, (*this)(ix, v_grid_.index(i, j, k)));
    return bmax / fmax;
  }

 private:
  SpaceGrid<Scalar> x_grid_;
  VelocityGrid<Scalar> v_grid_;
  Scalar time_;
  Array values_;
};

using PhaseFieldd = PhaseField<double>;

}  // namespace nclb
