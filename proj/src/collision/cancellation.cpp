#include "nclb/collision/cancellation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nclb/collision/quadrature.hpp"
#include "nclb/core/errors.hpp"

namespace nclb {

double c_cancel_analytic(const KernelParams& params) {
  // the bracket is ~ (3+gamma) t^2 / 8, so the integrand is ~ t^(1-2s) near 0
  const double eps = 1e-8;
  const double half_pi = 0.5 * std::numbers::pi;
  auto integrand = [&](double t) {
    return std::sin(t) * (std::pow(std::cos(0.5 * t), -3.0 - params.gamma) - 1.0) * std::pow(t, -2.0 - 2.0 * params.s) *
           params.b_tilde(std::cos(t));
  };
  double acc = 0.0;
  const Rule1D lo = log_gauss_legendre(64, eps, 0.1);
  const Rule1D hi = gauss_legendre(64, 0.1, half_pi);
  for (std::size_t i = 0; i < lo.x.size(); ++i) acc += lo.w[i] * integrand(lo.x[i]);
  for (std::size_t i = 0; i < hi.x.size(); ++i) acc += hi.w[i] * integrand(hi.x[i]);
  acc += (3.0 + params.gamma) / 8.0 * params.b_tilde(1.0) * std::pow(eps, 2.0 - 2.0 * params.s) / (2.0 - 2.0 * params.s);
  return 2.0 * std::numbers::pi * acc;
}

void ConvolutionQuadrature::validate() const {
  require(n_r >= 8 && n_pol >= 8 && n_az >= 8, "ConvolutionQuadrature: resolutions >= 8");
}

double riesz_convolution(const VelocityFunction& f, const Vec3d& v, double exponent,
                         const ConvolutionQuadrature& quad) {
  quad.validate();
  require(exponent > -3.0, "riesz_convolution: exponent > -3");
  require(f.compact(), "riesz_convolution: f needs a finite support radius");
  if (f.radius <= 0.0) return 0.0;
  const Vec3d axis_raw = f.centre - v;
  const double d = axis_raw.norm();
  const double R = f.radius;
  const Vec3d axis = d > 0.0 ? Vec3d(axis_raw / d) : Vec3d::UnitZ();
  // f(v - z) over all z equals f(v + z) over all z
  auto shell = [&](double r) {
    double half = std::numbers::pi;
    if (d > 0.0) {
      const double c = (r * r + d * d - R * R) / (2.0 * r * d);
      if (c >= 1.0) return 0.0;
      if (c > -1.0) half = std::acos(c);
    }
    double acc = 0.0;
    for (const auto& n : cap_rule(quad.n_pol, quad.n_az, axis, half)) acc += n.w * f(v + r * n.dir);
    return acc;
  };

  double total = 0.0;
  const double p = exponent + 3.0;
  double r_lo = std::max(0.0, d - R);
  if (d < R) {
    // int_0^{r1} r^(p-1) F(r) dr = (1/p) int_0^{r1^p} F(t^(1/p)) dt
    const double r1 = (R - d) / 8.0;
    const Rule1D rt = gauss_legendre(quad.n_r / 2, 0.0, std::pow(r1, p));
    for (std::size_t i = 0; i < rt.x.size(); ++i) total += rt.w[i] / p * shell(std::pow(rt.x[i], 1.0 / p));
    const Rule1D rm = gauss_legendre(quad.n_r, r1, R - d);
    for (std::size_t i = 0; i < rm.x.size(); ++i) total += rm.w[i] * std::pow(rm.x[i], p - 1.0) * shell(rm.x[i]);
    r_lo = R - d;
  }
  const Rule1D rr = gauss_legendre(quad.n_r, r_lo, d + R);
  for (std::size_t i = 0; i < rr.x.size(); ++i) total += rr.w[i] * std::pow(rr.x[i], p - 1.0) * shell(rr.x[i]);
  return total;
}

double q_ns(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v, const KernelParams& params,
            double c_cancel, const ConvolutionQuadrature& quad) {
  const double gv = g(v);
  if (gv == 0.0 || f.radius <= 0.0) return 0.0;
  return c_cancel * gv * riesz_convolution(f, v, params.gamma, quad);
}

CancellationSample measure_c_cancel(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v,
                                    const KernelParams& params, const SigmaQuadrature& sq,
                                    const CarlemanQuadrature& cq, const ConvolutionQuadrature& vq) {
  const double gv = g(v);
  require(gv != 0.0, "measure_c_cancel: g(v) != 0");
  CancellationSample out;
  out.v = v;
  out.convolution = riesz_convolution(f, v, params.gamma, vq);
  require(out.convolution > 0.0, "measure_c_cancel: v within reach of supp f");
  const SigmaResult sr = q_sigma(f, g, v, params, sq);
  const CarlemanResult cr = q_s_carleman(f, g, v, params, cq);
  out.ratio_sigma = sr.nonsingular / (gv * out.convolution);
  out.ratio_difference = (sr.total - cr.value) / (gv * out.convolution);
  return out;
}

}  // namespace nclb
