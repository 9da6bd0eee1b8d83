#pragma once

#include "nclb/collision/velocity_function.hpp"
#include "nclb/core/kernel_params.hpp"

namespace nclb {

/// Resolution of the sigma-representation quadrature.
///
/// The relative velocity u = v* - v runs over a ball in spherical coordinates
/// (n_r Gauss-Legendre radii, n_pol x n_az directions). For each u the
/// deflection angle theta in [theta_min, pi/2] uses n_theta log-spaced
/// Gauss-Legendre nodes and n_phi uniform azimuths; the azimuthal sum pairs
/// opposite deflections, so the first-order grazing term cancels.
struct SigmaQuadrature {
  int n_theta = 16;
  int n_phi = 16;
  double theta_min = 0.05;
  int n_r = 24;
  int n_pol = 32;
  int n_az = 64;
  /// nodes per extrapolation band [theta_min/4, theta_min/2], [theta_min/2, theta_min]
  int n_band = 4;
  /// max |E(theta_min/2) - E(theta_min)| / (1 + |E|) before signalling non-convergence
  double tolerance = 0.02;
  bool cancellation_mode = true;

  void validate() const;
  SigmaQuadrature refined(int levels = 1) const;
};

/// Richardson-extrapolated values of Q and of its two Carleman parts, all on
/// the same quadrature.
struct SigmaResult {
  double total = 0.0;
  double singular = 0.0;     // Q_s: (g(v') - g(v)) f(v*')
  double nonsingular = 0.0;  // Q_ns: g(v) (f(v*') - f(v*))
  /// extrapolations from cutoffs (theta_min, theta_min/2) and (theta_min/2, theta_min/4)
  double total_coarse = 0.0;
  double total_fine = 0.0;
  bool converged = true;
};

/// Q(f, g)(v) = int int B(v - v*, sigma) (f(v*') g(v') - f(v*) g(v)) dsigma dv*,
/// with deflections restricted to theta <= pi/2. Throws ConvergenceError when
/// the two extrapolations disagree by more than quad.tolerance.
SigmaResult q_sigma(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v, const KernelParams& params,
                    const SigmaQuadrature& quad, bool throw_on_divergence = true);

}  // namespace nclb
