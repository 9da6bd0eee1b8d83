#include "nclb/collision/lambda.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "nclb/core/errors.hpp"

namespace nclb {

GNorms sample_norms(const VelocityFunction& g, const Vec3d& centre, double half, int n, double h) {
  GNorms out;
  const double step = 2.0 * half / (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3d v = centre + Vec3d(-half + i * step, -half + j * step, -half + k * step);
        const double g0 = g(v);
        out.sup = std::max(out.sup, std::abs(g0));
        Eigen::Matrix3d H;
        for (int a = 0; a < 3; ++a) {
          const Vec3d ea = h * Vec3d::Unit(a);
          H(a, a) = (g(v + ea) + g(v - ea) - 2.0 * g0) / (h * h);
          for (int b = a + 1; b < 3; ++b) {
            const Vec3d eb = h * Vec3d::Unit(b);
            H(a, b) = H(b, a) = (g(v + ea + eb) - g(v + ea - eb) - g(v - ea + eb) + g(v - ea - eb)) / (4.0 * h * h);
          }
        }
        const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(H).eigenvalues();
        out.hessian = std::max(out.hessian, ev.cwiseAbs().maxCoeff());
      }
  return out;
}

namespace {

double hydro_moment(const VelocityFunction& f, const KernelParams& params, const ConvolutionQuadrature& vq) {
  // int (1 + |w|^m) f(w) dw, written as convolutions about the origin
  const double m = std::max(2.0, params.gamma_2s());
  return riesz_convolution(f, Vec3d::Zero(), 0.0, vq) + riesz_convolution(f, Vec3d::Zero(), m, vq);
}

}  // namespace

LambdaReport measure_lambda(const std::vector<LambdaPair>& battery, const KernelParams& params,
                            const CarlemanQuadrature& cq, const ConvolutionQuadrature& vq) {
  require(!battery.empty(), "measure_lambda: non-empty battery");
  LambdaReport rep;
  const double s = params.s;
  for (const auto& pair : battery) {
    require(pair.g.compact(), "measure_lambda: g needs a finite sampling box");
    const GNorms gn = sample_norms(pair.g, pair.g.centre, pair.g.radius);
    const double gfac = std::pow(gn.sup, 1.0 - s) * std::pow(gn.hessian, s);
    const double K0 = hydro_moment(pair.f, params, vq);
    for (const auto& v : pair.points) {
      LambdaRow row;
      row.label = pair.label;
      row.v = v;
      row.q_s = q_s_carleman(pair.f, pair.g, v, params, cq).value;
      row.convolution = riesz_convolution(pair.f, v, params.gamma_2s(), vq);
      row.ratio_convolution = std::abs(row.q_s) / (row.convolution * gfac);
      row.ratio_hydro = std::abs(row.q_s) / (std::pow(japanese(v.norm()), params.gamma_2s_plus()) * K0 * gfac);
      rep.lambda_convolution = std::max(rep.lambda_convolution, row.ratio_convolution);
      rep.lambda_hydro = std::max(rep.lambda_hydro, row.ratio_hydro);
      rep.rows.push_back(row);
    }
  }
  return rep;
}

void store_lambda(ConstantsRegistry& reg, const LambdaReport& report) {
  require(report.lambda_convolution > 0.0, "store_lambda: Lambda > 0");
  reg.set("Lambda", report.lambda_convolution, Provenance::measured);
}

std::vector<LambdaPair> default_lambda_battery() {
  const std::vector<Vec3d> pts = {Vec3d(0, 0, 0), Vec3d(0.6, 0.2, 0), Vec3d(-0.4, 0.5, 0.3), Vec3d(1.1, -0.3, 0.4)};
  std::vector<LambdaPair> out;
  auto add = [&](VelocityFunction f, VelocityFunction g, std::string label) {
    out.push_back({std::move(f), std::move(g), pts, std::move(label)});
  };
  add(bump(Vec3d(0, 0, 0), 1.0), gaussian(Vec3d(0, 0, 0), 0.5), "bump1/gauss0.5");
  add(bump(Vec3d(0.3, 0, 0), 1.0), gaussian(Vec3d(0, 0.2, 0), 0.7), "bump1s/gauss0.7");
  add(bump(Vec3d(0, 0, 0), 1.5, 1.0, 3), gaussian(Vec3d(0.5, 0, 0), 0.4), "bump1.5/gauss0.4");
  add(bump(Vec3d(-0.2, 0.1, 0), 0.8, 2.0), bump(Vec3d(0, 0, 0), 1.2, 1.0, 4), "bump0.8/bump1.2");
  add(gaussian(Vec3d(0, 0, 0), 0.5), gaussian(Vec3d(0, 0, 0), 1.0), "gauss0.5/gauss1");
  add(gaussian(Vec3d(0.4, 0, 0), 0.35), bump(Vec3d(0.2, 0.2, 0), 1.0, 1.0, 5), "gauss0.35/bump1");
  add(bump(Vec3d(0, 0.5, 0), 0.6), gaussian(Vec3d(0, 0, 0.3), 0.6), "bump0.6/gauss0.6");
  add(maxwellian(1.0, Vec3d(0, 0, 0), 0.25), gaussian(Vec3d(0, 0, 0), 0.8), "maxwell/gauss0.8");
  add(bump(Vec3d(0, 0, 0), 2.0, 0.5, 4), bump(Vec3d(0.4, 0, 0), 0.9, 1.0, 4), "bump2/bump0.9");
  {
    VelocityFunction g;
    g.eval = [](const Vec3d& v) {
      const double r2 = v.squaredNorm();
      return (1.0 + 0.5 * v[0]) * std::exp(-r2);
    };
    g.centre = Vec3d::Zero();
    g.radius = 6.0;
    g.label = "tilted";
    add(bump(Vec3d(0.1, -0.1, 0), 1.0), g, "bump1/tilted");
  }
  return out;
}

}  // namespace nclb
