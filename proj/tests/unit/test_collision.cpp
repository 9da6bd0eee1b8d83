#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "nclb/collision/cancellation.hpp"
#include "nclb/collision/carleman.hpp"
#include "nclb/collision/cone.hpp"
#include "nclb/collision/equivalence.hpp"
#include "nclb/collision/grid_operator.hpp"
#include "nclb/collision/lambda.hpp"
#include "nclb/collision/quadrature.hpp"
#include "nclb/collision/sigma.hpp"

using namespace nclb;

TEST_CASE("Gauss-Legendre and sphere rules") {
  const auto r = gauss_legendre(4, 0.0, 2.0);
  double m5 = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) m5 += r.w[i] * std::pow(r.x[i], 5);
  CHECK(m5 == doctest::Approx(64.0 / 6.0).epsilon(1e-12));

  const auto lg = log_gauss_legendre(16, 0.01, 1.0);
  double inv = 0.0;
  for (std::size_t i = 0; i < lg.x.size(); ++i) inv += lg.w[i] / lg.x[i];
  CHECK(inv == doctest::Approx(std::log(100.0)).epsilon(1e-10));

  double full = 0.0, half = 0.0, z2 = 0.0;
  for (const auto& n : sphere_rule(8, 16)) {
    full += n.w;
    z2 += n.w * n.dir[2] * n.dir[2];
  }
  for (const auto& n : sphere_rule(8, 16, Vec3d::UnitX(), true)) {
    half += n.w;
    CHECK(n.dir[0] >= 0.0);
  }
  CHECK(full == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(half == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(z2 == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}

TEST_CASE("cancellation constant matches an independent high-precision quadrature") {
  // reference values: 50-digit adaptive quadrature of the defining integral
  CHECK(c_cancel_analytic(make_kernel(0.0, 0.5)) == doctest::Approx(3.96033314978743).epsilon(1e-8));
  CHECK(c_cancel_analytic(make_kernel(-1.0, 0.5)) == doctest::Approx(2.48211439607785).epsilon(1e-8));
  CHECK(c_cancel_analytic(make_kernel(0.0, 0.25)) == doctest::Approx(3.37593369220879).epsilon(1e-8));
}

TEST_CASE("Riesz convolution of a ball indicator at its centre") {
  for (double gamma : {-1.0, 0.0, 0.5}) {
    const double R = 0.8;
    const double exact = 4.0 * std::numbers::pi * std::pow(R, 3.0 + gamma) / (3.0 + gamma);
    CHECK(riesz_convolution(ball_indicator(Vec3d::Zero(), R), Vec3d::Zero(), gamma) ==
          doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("Q_ns vanishes where g does and is non-negative otherwise") {
  const auto p = make_kernel(-1.0, 0.5);
  const auto f = bump(Vec3d::Zero(), 1.0);
  const auto g = bump(Vec3d(2.0, 0, 0), 0.5);
  CHECK(q_ns(f, g, Vec3d::Zero(), p, c_cancel_analytic(p)) == 0.0);
  CHECK(q_ns(f, gaussian(Vec3d::Zero(), 1.0), Vec3d(0.3, 0, 0), p, c_cancel_analytic(p)) > 0.0);
}

TEST_CASE("trivial arguments of the collision forms") {
  const auto p = make_kernel(0.0, 0.5);
  const auto f = bump(Vec3d::Zero(), 1.0);
  const Vec3d v(0.2, 0.1, 0.0);
  CHECK(q_sigma(zero(), gaussian(Vec3d::Zero(), 1.0), v, p, SigmaQuadrature{}).total == 0.0);
  CHECK(q_s_carleman(zero(), gaussian(Vec3d::Zero(), 1.0), v, p, CarlemanQuadrature{}).value == 0.0);
  CHECK(q_s_carleman(f, constant(2.0), v, p, CarlemanQuadrature{}).value == 0.0);

  const auto qs = q_sigma(f, constant(2.0), v, p, SigmaQuadrature{});
  const double ns = q_ns(f, constant(2.0), v, p, c_cancel_analytic(p));
  CHECK(std::abs(qs.singular) < 1e-12);
  CHECK(qs.total == doctest::Approx(ns).epsilon(1e-3));
}

TEST_CASE("Carleman kernel: zero, positivity and linearity") {
  const auto p = make_kernel(-1.0, 0.5);
  const PlaneQuadrature pq;
  const Vec3d v(1.5, 0.2, 0.0), vp(1.2, -0.1, 0.3);
  CHECK(carleman_kernel(zero(), v, vp, p, pq).value == 0.0);
  const auto f = bump(Vec3d::Zero(), 1.0);
  const auto h = gaussian(Vec3d(0.3, 0, 0), 0.4);
  const double kf = carleman_kernel(f, v, vp, p, pq).value;
  const double kh = carleman_kernel(h, v, vp, p, pq).value;
  CHECK(kf > 0.0);
  CHECK(kh > 0.0);
  VelocityFunction sum{[&](const Vec3d& w) { return 2.0 * f(w) + 0.5 * h(w); }, Vec3d::Zero(), 4.0, "sum"};
  CHECK(carleman_kernel(sum, v, vp, p, pq).value == doctest::Approx(2.0 * kf + 0.5 * kh).epsilon(1e-4));
  CHECK_THROWS_AS(carleman_kernel(f, v, v, p, pq), ConfigError);
}

TEST_CASE("plane integral over a ball section matches a brute-force plane sum") {
  const auto p = make_kernel(-1.0, 0.5);
  const Vec3d v0(0.0, 0.0, 0.0);
  const auto f = ball_indicator(v0, 1.0);
  const Vec3d v(2.0, 0.3, 0.0), n = Vec3d(0.0, 0.0, 1.0);
  const double rho = 0.4;
  const double value = plane_integral(f, v, n, rho, p, PlaneQuadrature{96, 96, 12.0, 1e-8});

  // midpoint sum on a Cartesian grid of the plane z = 0 around the disc
  const int m = 1200;
  const double h = 2.0 / m;
  double brute = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Vec3d w(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h, 0.0);
      if (w.norm() >= 1.0) continue;
      const double b = (w - v).norm();
      if (b < rho) continue;
      const double theta = 2.0 * std::atan(rho / b);
      brute += h * h * std::pow(b, p.gamma + 2.0 * p.s + 1.0) * carleman_angular(theta, p);
    }
  CHECK(value == doctest::Approx(brute).epsilon(0.01));
}

TEST_CASE("Carleman angular weight limit") {
  const auto p = make_kernel(0.0, 0.5);
  CHECK(carleman_angular(1e-8, p) == doctest::Approx(0.5));
  CHECK(carleman_angular(1e-3, p) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("maximum principle at a global minimum of g") {
  const auto p = make_kernel(0.0, 0.5);
  const auto f = bump(Vec3d(0.2, 0, 0), 1.0);
  const auto g = gaussian(Vec3d::Zero(), 0.7, -1.0);  // global minimum at 0
  const auto r = q_s_carleman(f, g, Vec3d::Zero(), p, CarlemanQuadrature{});
  CHECK(r.value >= -1e-3);
}

TEST_CASE("sigma and Carleman forms agree on sample points") {
  const auto p = make_kernel(0.0, 0.5);
  auto battery = default_equivalence_battery(2, 7);
  battery.resize(2);
  const auto rep = run_equivalence(battery, p, SigmaQuadrature{}, CarlemanQuadrature{});
  CHECK(rep.all_converged);
  CHECK(rep.max_residual <= 0.02);
  CHECK(rep.rows.size() == 4);
}

TEST_CASE("cone measures") {
  const Vec3d v0 = Vec3d::Zero();
  const auto full = make_cone(v0, v0, 1.0);
  CHECK(full.full_sphere);
  CHECK(full.measure == doctest::Approx(4.0 * std::numbers::pi));

  // Monte-Carlo oracle of the strip condition |omega . (v0 - v)| < r/2
  const double r = 1.0;
  const Vec3d v(6.0, 8.0, 0.0);
  const auto c = make_cone(v, v0, r);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  int hit = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Vec3d w = Vec3d(nd(rng), nd(rng), nd(rng)).normalized();
    if (std::abs(w.dot(v0 - v)) < 0.5 * r) ++hit;
  }
  const double mc = 4.0 * std::numbers::pi * hit / n;
  CHECK(c.measure == doctest::Approx(mc).epsilon(0.05));
  CHECK(c.measure == doctest::Approx(4.0 * std::numbers::pi * (r / 2.0) / 10.0).epsilon(0.2));
}

TEST_CASE("cone lower bound holds on validation samples") {
  const auto p = make_kernel(0.0, 0.5);
  ConeOptions opt;
  opt.n_calibration = 10;
  opt.n_validation = 20;
  const auto rep = cone_of_nondegeneracy({Vec3d(2, 0, 0), Vec3d(10, 0, 0)}, Vec3d::Zero(), 1.0, 1.0, p, opt);
  CHECK(rep.mu > 0.0);
  CHECK(rep.lambda > 0.0);
  CHECK(rep.violations == 0);
}

TEST_CASE("Lambda measurement rejects an empty battery") {
  CHECK_THROWS_AS(measure_lambda({}, make_kernel(0.0, 0.5), CarlemanQuadrature{}), ConfigError);
}

TEST_CASE("grid operator conserves mass and maps zero to zero") {
  const auto p = make_kernel(-1.0, 0.5);
  VelocityGrid<double> g(2.5, 12);
  GridCollisionOperator op(g, p);
  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(g.size()), q;
  op.apply(f, q);
  CHECK(q.abs().maxCoeff() == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.node(i).norm() < 1.0 ? 1.0 : 0.0;
  const auto info = op.apply(f, q);
  CHECK(std::abs(q.sum()) <= 1e-10 * q.abs().sum());
  CHECK(info.c_effective > 0.0);
  CHECK(info.max_loss_rate > 0.0);
  CHECK(op.c_cancel() == doctest::Approx(c_cancel_analytic(p)));
}

TEST_CASE("unit cube Riesz integral") {
  CHECK(unit_cube_riesz(0.0) == doctest::Approx(1.0));
  CHECK(unit_cube_riesz(2.0) == doctest::Approx(0.25));  // 3 * int x^2 over [-1/2, 1/2]
}
