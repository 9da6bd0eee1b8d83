#pragma once

#include "nclb/collision/carleman.hpp"
#include "nclb/collision/sigma.hpp"
#include "nclb/collision/velocity_function.hpp"
#include "nclb/core/kernel_params.hpp"

namespace nclb {

/// 2 pi int_0^{pi/2} sin(t) [cos(t/2)^(-3-gamma) - 1] t^(-2-2s) b_tilde(cos t) dt
double c_cancel_analytic(const KernelParams& params);

/// Spherical quadrature about v for convolutions; radii and directions are
/// clipped to the support ball of f, so indicator functions are integrated
/// without staircase error.
struct ConvolutionQuadrature {
  int n_r = 32;
  int n_pol = 16;
  int n_az = 32;

  void validate() const;
};

/// int |z|^exponent f(v - z) dz for exponent > -3.
double riesz_convolution(const VelocityFunction& f, const Vec3d& v, double exponent,
                         const ConvolutionQuadrature& quad = {});

/// C g(v) int |z|^gamma f(v - z) dz
double q_ns(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v, const KernelParams& params,
            double c_cancel, const ConvolutionQuadrature& quad = {});

struct CancellationSample {
  Vec3d v = Vec3d::Zero();
  double convolution = 0.0;
  /// sigma-side nonsingular integral divided by g(v) * convolution
  double ratio_sigma = 0.0;
  /// (Q_sigma - Q_s Carleman) divided by g(v) * convolution
  double ratio_difference = 0.0;
};

/// Measures the cancellation constant at one point from both sides. Requires g(v) != 0.
CancellationSample measure_c_cancel(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v,
                                    const KernelParams& params, const SigmaQuadrature& sq,
                                    const CarlemanQuadrature& cq, const ConvolutionQuadrature& vq = {});

}  // namespace nclb
