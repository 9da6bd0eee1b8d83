#include "nclb/collision/carleman.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nclb/collision/quadrature.hpp"
#include "nclb/core/errors.hpp"

namespace nclb {

double carleman_angular(double theta, const KernelParams& params) {
  const double h = 0.5 * theta;
  if (theta < 1e-6) return std::pow(2.0, -2.0 * params.s) * params.b_tilde(std::cos(theta));
  return 4.0 * std::pow(std::tan(h) / theta, 2.0 + 2.0 * params.s) * std::pow(std::cos(h), 1.0 - params.gamma) *
         params.b_tilde(std::cos(theta));
}

void PlaneQuadrature::validate() const {
  require(n_radial >= 8 && n_angular >= 8, "PlaneQuadrature: resolutions >= 8");
  require(extent > 0.0, "PlaneQuadrature: extent > 0");
}

double plane_integral(const VelocityFunction& f, const Vec3d& v, const Vec3d& n, double rho,
                      const KernelParams& params, const PlaneQuadrature& pq, bool* truncated) {
  if (truncated) *truncated = false;
  if (f.radius <= 0.0) return 0.0;
  Vec3d e1, e2;
  orthonormal_frame(n, e1, e2);
  const double p_exp = params.gamma + 2.0 * params.s + 2.0;  // includes the polar Jacobian

  double b_lo = rho, b_hi = pq.extent;
  double q = 0.0, rd = 0.0, psi0 = 0.0;
  const bool compact = f.compact();
  if (compact) {
    const Vec3d cv = f.centre - v;
    const double dist = cv.dot(n);
    if (std::abs(dist) >= f.radius) return 0.0;
    rd = std::sqrt(f.radius * f.radius - dist * dist);
    const Vec3d p = cv - dist * n;  // disc centre relative to v, in the plane
    q = p.norm();
    psi0 = std::atan2(p.dot(e2), p.dot(e1));
    b_lo = std::max(rho, q - rd);
    b_hi = q + rd;
    if (b_lo >= b_hi) return 0.0;
  }

  const Rule1D rb = gauss_legendre(pq.n_radial, b_lo, b_hi);
  double acc = 0.0;
  for (int i = 0; i < pq.n_radial; ++i) {
    const double beta = rb.x[i];
    // angular window of the circle |b| = beta inside the disc
    double half = std::numbers::pi;
    if (compact && q > 0.0) {
      const double c = (beta * beta + q * q - rd * rd) / (2.0 * beta * q);
      if (c >= 1.0) continue;
      if (c > -1.0) half = std::acos(c);
    }
    const Rule1D ra = gauss_legendre(pq.n_angular, psi0 - half, psi0 + half);
    double ang = 0.0;
    for (int j = 0; j < pq.n_angular; ++j)
      ang += ra.w[j] * f(v + beta * (std::cos(ra.x[j]) * e1 + std::sin(ra.x[j]) * e2));
    acc += rb.w[i] * ang * std::pow(beta, p_exp) * carleman_angular(2.0 * std::atan(rho / beta), params);
  }

  if (!compact && truncated) {
    double edge = 0.0, inner = 0.0;
    for (int j = 0; j < 16; ++j) {
      const double psi = 2.0 * std::numbers::pi * j / 16;
      const Vec3d dir = std::cos(psi) * e1 + std::sin(psi) * e2;
      edge = std::max(edge, std::abs(f(v + pq.extent * dir)));
      inner = std::max(inner, std::abs(f(v + 0.5 * pq.extent * dir)));
    }
    *truncated = edge > pq.decay_tolerance * std::max(inner, std::abs(f(v)));
  }
  return acc;
}

CarlemanKernelEval carleman_kernel(const VelocityFunction& f, const Vec3d& v, const Vec3d& v_prime,
                                   const KernelParams& params, const PlaneQuadrature& pq) {
  pq.validate();
  const Vec3d a = v_prime - v;
  const double rho = a.norm();
  require(rho > 0.0, "carleman_kernel: v != v_prime");
  CarlemanKernelEval out;
  out.v = v;
  out.v_prime = v_prime;
  out.plane_quadrature = pq;
  const double plane = plane_integral(f, v, a / rho, rho, params, pq, &out.truncation_warning);
  out.value = plane * std::pow(rho, -3.0 - 2.0 * params.s);
  return out;
}

void CarlemanQuadrature::validate() const {
  plane.validate();
  require(n_rho >= 8 && n_pol >= 4 && n_az >= 8, "CarlemanQuadrature: n_rho >= 8, n_pol >= 4, n_az >= 8");
  require(rho_min > 0.0, "CarlemanQuadrature: rho_min > 0");
  require(n_band >= 2, "CarlemanQuadrature: n_band >= 2");
}

CarlemanQuadrature CarlemanQuadrature::refined(int levels) const {
  CarlemanQuadrature q = *this;
  for (int l = 0; l < levels; ++l) {
    q.n_rho *= 2;
    q.n_pol *= 2;
    q.n_az *= 2;
    q.rho_min /= 2;
    q.plane.n_radial *= 2;
    q.plane.n_angular *= 2;
  }
  return q;
}

CarlemanResult q_s_carleman(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v,
                            const KernelParams& params, const CarlemanQuadrature& quad, bool throw_on_divergence) {
  quad.validate();
  CarlemanResult res;
  if (f.radius <= 0.0) return res;
  const double rho_max = f.compact() ? (v - f.centre).norm() + f.radius : quad.plane.extent;
  const double rm = std::min(quad.rho_min, rho_max / 8.0);
  const std::array<Rule1D, 3> bands = {log_gauss_legendre(quad.n_rho, rm, rho_max),
                                       log_gauss_legendre(quad.n_band, rm / 2, rm),
                                       log_gauss_legendre(quad.n_band, rm / 4, rm / 2)};
  const auto dirs = sphere_rule(quad.n_pol, quad.n_az, Vec3d::UnitZ(), true);
  const double gv = g(v);
  const double kexp = -3.0 - 2.0 * params.s;

  std::array<double, 3> sums{};
  for (int b = 0; b < 3; ++b) {
    const Rule1D& rr = bands[b];
    for (std::size_t i = 0; i < rr.x.size(); ++i) {
      const double rho = rr.x[i];
      double acc = 0.0;
      for (const auto& dn : dirs) {
        const Vec3d a = rho * dn.dir;
        const double d2 = g(v + a) + g(v - a) - 2.0 * gv;
        if (d2 == 0.0) continue;
        acc += dn.w * d2 * plane_integral(f, v, dn.dir, rho, params, quad.plane);
      }
      sums[b] += rr.w[i] * rho * rho * std::pow(rho, kexp) * acc;
    }
  }

  const double ratio = std::pow(2.0, 2.0 - 2.0 * params.s);
  const double q1 = sums[0], q2 = q1 + sums[1], q3 = q2 + sums[2];
  res.coarse = (ratio * q2 - q1) / (ratio - 1.0);
  res.fine = (ratio * q3 - q2) / (ratio - 1.0);
  res.value = res.fine;
  res.converged = std::abs(res.fine - res.coarse) <= quad.tolerance * (1.0 + std::abs(res.fine));
  if (!res.converged && throw_on_divergence) {
    std::ostringstream msg;
    msg << "q_s_carleman: inner-radius extrapolations disagree (" << res.coarse << " vs " << res.fine << ")";
    throw ConvergenceError(msg.str());
  }
  return res;
}

}  // namespace nclb
