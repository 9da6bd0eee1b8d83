#include "nclb/collision/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nclb/collision/quadrature.hpp"
#include "nclb/core/errors.hpp"

namespace nclb {

Cone make_cone(const Vec3d& v, const Vec3d& v0, double r, int n_pol, int n_az) {
  require(r > 0.0, "make_cone: r > 0");
  Cone c;
  c.v = v;
  const double d = (v0 - v).norm();
  if (d <= 0.5 * r) {
    c.full_sphere = true;
    c.half_width = 1.0;
    c.measure = c.analytic_measure = 4.0 * std::numbers::pi;
    return c;
  }
  c.full_sphere = false;
  c.axis = (v0 - v) / d;
  c.half_width = 0.5 * r / d;
  c.analytic_measure = 4.0 * std::numbers::pi * c.half_width;
  for (const auto& n : sphere_rule(n_pol, n_az))
    if (c.contains(n.dir)) c.measure += n.w;
  return c;
}

ConeSample sample_on_cone(const Cone& cone, const Vec3d& v0, double r, const VelocityFunction& minorant,
                          const KernelParams& params, const PlaneQuadrature& pq, std::uint64_t& state) {
  std::mt19937_64 rng(state);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec3d omega;
  do {
    omega = Vec3d(normal(rng), normal(rng), normal(rng)).normalized();
  } while (!cone.contains(omega));
  const double d = (v0 - cone.v).norm();
  const double t_hi = std::min(1.0, d - r);
  require(t_hi > 0.01, "sample_on_cone: |v - v0| > r + 0.01");
  const double t = 0.01 + (t_hi - 0.01) * uni(rng);
  state = rng();

  ConeSample s;
  s.v = cone.v;
  s.v_prime = cone.v - t * omega;
  s.kernel = carleman_kernel(minorant, s.v, s.v_prime, params, pq).value;
  s.weight = std::pow(1.0 + s.v.norm(), 1.0 + params.gamma_2s()) * std::pow(t, -3.0 - 2.0 * params.s);
  return s;
}

ConeReport cone_of_nondegeneracy(const std::vector<Vec3d>& vs, const Vec3d& v0, double r, double delta,
                                 const KernelParams& params, const ConeOptions& opt) {
  require(!vs.empty(), "cone_of_nondegeneracy: at least one v");
  require(delta > 0.0 && r > 0.0, "cone_of_nondegeneracy: delta, r > 0");
  ConeReport rep;
  const VelocityFunction minorant = ball_indicator(v0, r, delta);
  rep.mu = std::numeric_limits<double>::infinity();
  for (const auto& v : vs) {
    rep.cones.push_back(make_cone(v, v0, r, opt.n_pol, opt.n_az));
    rep.mu = std::min(rep.mu, rep.cones.back().measure * (1.0 + v.norm()));
  }

  std::uint64_t state = opt.seed;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : rep.cones)
    for (int i = 0; i < opt.n_calibration; ++i) {
      rep.calibration.push_back(sample_on_cone(c, v0, r, minorant, params, opt.plane, state));
      lo = std::min(lo, rep.calibration.back().kernel / rep.calibration.back().weight);
    }
  rep.lambda = opt.safety * lo;
  for (const auto& c : rep.cones)
    for (int i = 0; i < opt.n_validation; ++i) {
      rep.validation.push_back(sample_on_cone(c, v0, r, minorant, params, opt.plane, state));
      const auto& s = rep.validation.back();
      if (s.kernel < rep.lambda * s.weight) ++rep.violations;
    }
  return rep;
}

}  // namespace nclb
