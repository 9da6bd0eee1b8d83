#include "nclb/collision/sigma.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nclb/collision/quadrature.hpp"
#include "nclb/core/errors.hpp"

namespace nclb {

void SigmaQuadrature::validate() const {
  require(theta_min > 0.0 && theta_min < std::numbers::pi / 4, "SigmaQuadrature: 0 < theta_min < pi/4");
  require(n_theta >= 8 && n_phi >= 8 && n_r >= 8 && n_pol >= 8 && n_az >= 8,
          "SigmaQuadrature: resolutions >= 8");
  require(n_phi % 2 == 0, "SigmaQuadrature: n_phi even (opposite deflections are paired)");
  require(n_band >= 2, "SigmaQuadrature: n_band >= 2");
  require(tolerance > 0.0, "SigmaQuadrature: tolerance > 0");
}

SigmaQuadrature SigmaQuadrature::refined(int levels) const {
  SigmaQuadrature q = *this;
  for (int l = 0; l < levels; ++l) {
    q.n_theta *= 2;
    q.n_phi *= 2;
    q.n_r *= 2;
    q.n_pol *= 2;
    q.n_az *= 2;
    q.theta_min /= 2;
  }
  return q;
}

namespace {

/// Radial rule on [0, r_max] with breakpoints where the loss term switches on and off.
Rule1D radial_rule(int n, double d, double R, double r_max) {
  const double a = std::max(0.0, d - R);
  const double b = std::min(d + R, r_max);
  Rule1D out;
  const double segs[4] = {0.0, a, b, r_max};
  const double total = r_max;
  for (int k = 0; k < 3; ++k) {
    const double len = segs[k + 1] - segs[k];
    if (len <= 1e-14 * r_max) continue;
    const int nk = std::max(4, static_cast<int>(std::lround(n * len / total)));
    out = concat(out, gauss_legendre(nk, segs[k], segs[k + 1]));
  }
  return out;
}

struct ThetaNode {
  double c, s, w;
};

std::vector<ThetaNode> theta_nodes(const Rule1D& rule, const KernelParams& p) {
  std::vector<ThetaNode> out;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double th = rule.x[i];
    const double c = std::cos(th);
    out.push_back({c, std::sin(th), rule.w[i] * std::sin(th) * std::pow(th, -2.0 - 2.0 * p.s) * p.b_tilde(c)});
  }
  return out;
}

}  // namespace

SigmaResult q_sigma(const VelocityFunction& f, const VelocityFunction& g, const Vec3d& v, const KernelParams& params,
                    const SigmaQuadrature& quad, bool throw_on_divergence) {
  quad.validate();
  SigmaResult res;
  if (f.radius <= 0.0) return res;
  require(f.compact(), "q_sigma: f needs a finite support radius");

  const double d = (v - f.centre).norm();
  const double R = f.radius;
  // theta <= pi/2 keeps |v*' - v| >= |v* - v| / sqrt(2), which bounds |v* - v|.
  const double r_max = std::sqrt(2.0) * (d + R);
  const Rule1D rr = radial_rule(quad.n_r, d, R, r_max);
  const auto dirs = sphere_rule(quad.n_pol, quad.n_az);

  const double tm = quad.theta_min;
  const std::array<std::vector<ThetaNode>, 3> bands = {
      theta_nodes(log_gauss_legendre(quad.n_theta, tm, std::numbers::pi / 2), params),
      theta_nodes(log_gauss_legendre(quad.n_band, tm / 2, tm), params),
      theta_nodes(log_gauss_legendre(quad.n_band, tm / 4, tm / 2), params)};

  std::vector<double> cphi(quad.n_phi), sphi(quad.n_phi);
  const double dphi = 2.0 * std::numbers::pi / quad.n_phi;
  for (int j = 0; j < quad.n_phi; ++j) {
    cphi[j] = std::cos(j * dphi);
    sphi[j] = std::sin(j * dphi);
  }

  const double gv = g(v);
  // sums[band][0: total, 1: singular, 2: nonsingular]
  double sums[3][3] = {};
  for (std::size_t ir = 0; ir < rr.x.size(); ++ir) {
    const double r = rr.x[ir];
    if (r <= 0.0) continue;
    const double wr = rr.w[ir] * r * r * std::pow(r, params.gamma);
    for (const auto& dn : dirs) {
      const Vec3d u = r * dn.dir;
      const double fstar = f(v + u);
      const Vec3d k = -dn.dir;
      Vec3d e1, e2;
      orthonormal_frame(k, e1, e2);
      const Vec3d mid = v + 0.5 * u;
      const double wu = wr * dn.w * dphi;
      for (int b = 0; b < 3; ++b) {
        double tot = 0.0, sing = 0.0, nons = 0.0;
        for (const auto& tn : bands[b]) {
          double gain = 0.0, sgain = 0.0, fsum = 0.0;
          for (int j = 0; j < quad.n_phi; ++j) {
            const Vec3d sigma = tn.c * k + tn.s * (cphi[j] * e1 + sphi[j] * e2);
            const Vec3d half = 0.5 * r * sigma;
            const double fsp = f(mid - half);
            if (fsp == 0.0) continue;
            const double gp = g(mid + half);
            gain += fsp * gp;
            sgain += (gp - gv) * fsp;
            fsum += fsp;
          }
          tot += tn.w * (gain - quad.n_phi * fstar * gv);
          sing += tn.w * sgain;
          nons += tn.w * gv * (fsum - quad.n_phi * fstar);
        }
        sums[b][0] += wu * tot;
        sums[b][1] += wu * sing;
        sums[b][2] += wu * nons;
      }
    }
  }

  const double rho = std::pow(2.0, 2.0 - 2.0 * params.s);
  auto extrap = [&](int q, double& coarse, double& fine) {
    const double q1 = sums[0][q];
    const double q2 = q1 + sums[1][q];
    const double q3 = q2 + sums[2][q];
    coarse = (rho * q2 - q1) / (rho - 1.0);
    fine = (rho * q3 - q2) / (rho - 1.0);
    return fine;
  };
  double c, fn;
  res.total = extrap(0, c, fn);
  res.total_coarse = c;
  res.total_fine = fn;
  res.singular = extrap(1, c, fn);
  res.nonsingular = extrap(2, c, fn);
  res.converged = std::abs(res.total_fine - res.total_coarse) <= quad.tolerance * (1.0 + std::abs(res.total_fine));
  if (!res.converged && throw_on_divergence) {
    std::ostringstream msg;
    msg << "q_sigma: cutoff extrapolations disagree (" << res.total_coarse << " vs " << res.total_fine << ") at v = ("
        << v.transpose() << ")";
    throw ConvergenceError(msg.str());
  }
  return res;
}

}  // namespace nclb
