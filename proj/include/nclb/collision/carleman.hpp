#pragma once

#include "nclb/collision/velocity_function.hpp"
#include "nclb/core/kernel_params.hpp"

namespace nclb {

/// Angular weight of the Carleman kernel as a function of the deflection
/// angle theta = 2 atan(|v'-v| / |v*'-v|) in (0, pi/2]:
///
///   b_c(theta) = 4 tan(theta/2)^(2+2s) cos(theta/2)^(1-gamma) theta^(-2-2s) b_tilde(cos theta)
///
/// so that K_f(v,v') = |v'-v|^(-3-2s) int_{plane, |v*'-v| >= |v'-v|} f(v*') |v-v*'|^(gamma+2s+1) b_c dv*'
/// reproduces Q_s of the sigma representation exactly. b_c -> 2^(-2s) as theta -> 0.
double carleman_angular(double theta, const KernelParams& params);

/// 2-D polar quadrature over the plane through v perpendicular to v'-v.
/// The polar origin is v; when f has a finite support ball the radial and
/// angular ranges are clipped to the disc where the plane cuts that ball.
struct PlaneQuadrature {
  int n_radial = 24;
  int n_angular = 24;
  /// radius cap for functions without finite support
  double extent = 12.0;
  /// relative size of f at the cap above which a truncation warning is raised
  double decay_tolerance = 1e-8;

  void validate() const;
};

struct CarlemanKernelEval {
  Vec3d v = Vec3d::Zero();
  Vec3d v_prime = Vec3d::Zero();
  double value = 0.0;
  PlaneQuadrature plane_quadrature;
  bool truncation_warning = false;
};

/// int_{b perp n, |b| >= rho} f(v+b) |b|^(gamma+2s+1) b_c(2 atan(rho/|b|)) db
double plane_integral(const VelocityFunction& f, const Vec3d& v, const Vec3d& n, double rho,
                      const KernelParams& params, const PlaneQuadrature& pq, bool* truncated = nullptr);

/// K_f(v, v'); rejects v == v'.
CarlemanKernelEval carleman_kernel(const VelocityFunction& f, const Vec3d& v, const Vec3d& v_prime,
                                   const KernelParams& params, const PlaneQuadrature& pq);

/// Resolution for the Carleman form of Q_s. The jump a = v' - v runs over
/// |a| in [rho_min, rho_max] (n_rho log-spaced nodes) and a hemisphere of
/// directions; the kernel is even in a, so each pair (v+a, v-a) enters as the
/// second difference g(v+a) + g(v-a) - 2 g(v). The innermost part [0, rho_min]
/// is recovered by Richardson extrapolation over two extra bands.
struct CarlemanQuadrature {
  int n_rho = 16;
  int n_pol = 16;
  int n_az = 32;
  double rho_min = 0.02;
  int n_band = 4;
  double tolerance = 0.02;
  PlaneQuadrature plane;

  void validate() const;
  CarlemanQuadrature refined(int levels = 1) const;
};

struct CarlemanResult {
  double value = 0.0;
  double coarse = 0.0;
  double fine = 0.0;
  bool converged = true;
};

/// Q_s(f, g)(v) = int (g(v') - g(v)) K_f(v, v') dv'
CarlemanResult q_s_carleman(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v,
                            const KernelParams& params, const CarlemanQuadrature& quad,
                            bool throw_on_divergence = true);

}  // namespace nclb
