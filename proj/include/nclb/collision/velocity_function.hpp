#pragma once

#include <functional>
#include <limits>
#include <string>

#include "nclb/core/grid.hpp"
#include "nclb/core/phase_field.hpp"

namespace nclb {

/// A function of velocity together with a ball outside of which it vanishes
/// (or is negligible). Quadratures use the ball to bound their domains.
struct VelocityFunction {
  std::function<double(const Vec3d&)> eval;
  Vec3d centre = Vec3d::Zero();
  double radius = std::numeric_limits<double>::infinity();
  std::string label;

  double operator()(const Vec3d& v) const { return eval(v); }
  bool compact() const { return std::isfinite(radius); }

  VelocityFunction scaled(double a) const;
};

/// (1 - |v-c|^2/R^2)_+^power times amp; C^(power-1) with compact support.
VelocityFunction bump(const Vec3d& centre, double R, double amp = 1.0, int power = 4);

/// rho (2 pi T)^(-3/2) exp(-|v-u|^2 / (2T)), declared negligible beyond
/// |v-u| = sqrt(2 T * 40).
VelocityFunction maxwellian(double rho = 1.0, const Vec3d& u = Vec3d::Zero(), double T = 1.0);

/// amp * 1_{B_r(c)}
VelocityFunction ball_indicator(const Vec3d& centre, double r, double amp = 1.0);

/// amp * exp(-|v-c|^2 / (2 w^2)), declared negligible beyond 9 w.
VelocityFunction gaussian(const Vec3d& centre, double width, double amp = 1.0);

VelocityFunction constant(double value);
VelocityFunction zero();

/// |v|^2 (no compact support; only usable as the second argument g)
VelocityFunction square_norm();

/// Trilinear interpolant of one velocity block of a PhaseField. The field
/// is captured by reference and must outlive the returned object.
VelocityFunction interpolant(const PhaseFieldd& f, int ix = 0);

}  // namespace nclb
