#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "nclb/core/grid.hpp"

namespace nclb {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [a, b] (Golub-Welsch).
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Gauss-Legendre in log(x) on [a, b] with a > 0; weights include the
/// Jacobian, so sum w_i g(x_i) ~ integral_a^b g(x) dx. Suited to integrands
/// that behave like powers of x.
Rule1D log_gauss_legendre(int n, double a, double b);

/// Concatenate rules on adjacent intervals.
Rule1D concat(const Rule1D& lhs, const Rule1D& rhs);

struct SphereNode {
  Vec3d dir;
  double w;
};

/// Product rule on S^2: Gauss-Legendre in cos(polar) about `axis`, uniform
/// in azimuth. With `half` set, only the hemisphere dir . axis >= 0 is
/// covered (weights still sum to 2 pi).
std::vector<SphereNode> sphere_rule(int n_polar, int n_azimuth, const Vec3d& axis = Vec3d::UnitZ(),
                                    bool half = false);

/// Spherical cap {dir : angle(dir, axis) <= half_angle}, GL in the polar
/// angle's cosine, uniform azimuth.
std::vector<SphereNode> cap_rule(int n_polar, int n_azimuth, const Vec3d& axis, double half_angle);

/// Orthonormal pair completing `n` (unit) to a right-handed frame.
void orthonormal_frame(const Vec3d& n, Vec3d& e1, Vec3d& e2);

}  // namespace nclb
