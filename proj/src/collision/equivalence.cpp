#include "nclb/collision/equivalence.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

namespace nclb {

EquivalenceReport run_equivalence(const std::vector<EquivalenceCase>& battery, const KernelParams& params,
                                  const SigmaQuadrature& sq, const CarlemanQuadrature& cq,
                                  const ConvolutionQuadrature& vq) {
  params.validate();
  const double C = c_cancel_analytic(params);
  EquivalenceReport rep;
  for (const auto& c : battery) {
    for (const auto& v : c.points) {
      const auto t0 = std::chrono::steady_clock::now();
      EquivalenceRow row;
      row.label = c.label;
      row.v = v;
      const SigmaResult sr = q_sigma(c.f, c.g, v, params, sq, false);
      const CarlemanResult cr = q_s_carleman(c.f, c.g, v, params, cq, false);
      row.sigma = sr.total;
      row.carleman_s = cr.value;
      row.nonsingular = c.f.radius > 0.0 ? q_ns(c.f, c.g, v, params, C, vq) : 0.0;
      row.residual = std::abs(row.sigma - row.carleman_s - row.nonsingular) / (1.0 + std::abs(row.sigma));
      row.converged = sr.converged && cr.converged;
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rep.max_residual = std::max(rep.max_residual, row.residual);
      rep.max_seconds = std::max(rep.max_seconds, row.seconds);
      rep.total_seconds += row.seconds;
      rep.all_converged = rep.all_converged && row.converged;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

std::vector<EquivalenceCase> default_equivalence_battery(int n_points, std::uint64_t seed) {
  std::vector<EquivalenceCase> out = {
      {bump(Vec3d(0.3, 0, 0), 1.0), gaussian(Vec3d(0, 0.2, 0), 0.7), {}, "bump/gaussian"},
      {bump(Vec3d(0, 0, 0), 1.2, 1.0, 3), bump(Vec3d(0.2, 0.1, 0), 1.5), {}, "bump3/bump"},
      {bump(Vec3d(-0.4, 0.3, 0), 0.8, 2.0), gaussian(Vec3d(0, 0, 0), 1.0), {}, "narrow-bump/gaussian"},
      {bump(Vec3d(0, 0, 0.5), 1.0, 1.0, 6), bump(Vec3d(0, 0, 0), 2.0, 0.5), {}, "bump6/wide-bump"},
      {bump(Vec3d(0.2, -0.2, 0.1), 1.3, 0.7), gaussian(Vec3d(0.5, -0.3, 0.2), 0.5), {}, "bump/offset-gaussian"},
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& c : out) {
    for (int i = 0; i < n_points; ++i) {
      Vec3d d(gauss(rng), gauss(rng), gauss(rng));
      c.points.push_back(1.5 * std::cbrt(unit(rng)) * d / d.norm());
    }
  }
  return out;
}

std::vector<EquivalenceCase> trivial_equivalence_battery() {
  return {{zero(), gaussian(Vec3d::Zero(), 1.0), {Vec3d::Zero(), Vec3d(1, 0, 0)}, "zero/gaussian"},
          {zero(), bump(Vec3d::Zero(), 1.0), {Vec3d(0.5, 0.5, 0)}, "zero/bump"}};
}

void write_equivalence_csv(std::ostream& out, const EquivalenceReport& report) {
  out << "label,vx,vy,vz,value_sigma,value_carleman,value_ns,residual,converged\n";
  out.precision(12);
  for (const auto& r : report.rows)
    out << r.label << ',' << r.v[0] << ',' << r.v[1] << ',' << r.v[2] << ',' << r.sigma << ',' << r.carleman_s << ','
        << r.nonsingular << ',' << r.residual << ',' << (r.converged ? 1 : 0) << '\n';
}

}  // namespace nclb
