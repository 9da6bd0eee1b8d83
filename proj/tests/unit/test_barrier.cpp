#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nclb/barrier/barrier.hpp"

using namespace nclb;

TEST_CASE("smooth positive part is C2 at both junctions") {
  using P = SmoothPositivePart;
  const double e = 1e-9;
  CHECK(P::value(0.0) == 0.0);
  CHECK(P::value(-1.0) == 0.0);
  CHECK(P::value(0.5) == doctest::Approx(0.5));
  CHECK(P::value(0.7) == doctest::Approx(0.7));
  CHECK(P::d1(0.5 - e) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(P::d2(0.5 - e) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::abs(P::d1(e)) < 1e-6);
  CHECK(std::abs(P::d2(e)) < 1e-6);
  // derivatives against central differences inside the blend
  const double s = 0.3, h = 1e-5;
  CHECK(P::d1(s) == doctest::Approx((P::value(s + h) - P::value(s - h)) / (2 * h)).epsilon(1e-8));
  CHECK(P::d2(s) == doctest::Approx((P::d1(s + h) - P::d1(s - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("step profiles") {
  CHECK(smoothstep_down(0.0) == 1.0);
  CHECK(smoothstep_down(1.0) == 0.0);
  CHECK(smoothstep_down(0.5) == doctest::Approx(0.5));
  CHECK(trapezoid_step_down(0.0) == doctest::Approx(1.0));
  CHECK(trapezoid_step_down(1.0) == doctest::Approx(0.0));
  CHECK(trapezoid_step_down(0.5) == doctest::Approx(0.5));
  double max2 = 0.0;
  for (int i = 0; i <= 1000; ++i) max2 = std::max(max2, std::abs(trapezoid_step_down(i / 1000.0, 2)));
  CHECK(max2 <= 4.0 / 0.9 + 1e-9);
}

TEST_CASE("push barrier values") {
  PushBarrierSpec s;
  s.c1 = 0.3;
  s.c2 = 0.75;
  s.x0 = Vec3d(0.1, 0, 0);
  s.v0 = Vec3d(1, 0, 0);
  s.r = 0.5;
  s.tau = 0.5;
  CHECK(push_barrier_eval(s, 0.0, s.x0, s.v0) == doctest::Approx(s.c2));
  const Vec3d far = s.v0 + Vec3d(0, 2.0, 0);
  CHECK(push_barrier_eval(s, 0.2, s.x0, far) == doctest::Approx(-s.c1 * 0.2));
  // |v - v0| = r / (tau sqrt2) gives psi(1/2) = 1/2
  const Vec3d half = s.v0 + Vec3d(0, s.r / (s.tau * std::sqrt(2.0)), 0);
  CHECK(push_barrier_eval(s, 0.0, s.x0, half) == doctest::Approx(0.5 * s.c2));
}

TEST_CASE("push barrier transport residual is second order") {
  PushBarrierSpec s;
  s.c1 = 0.3;
  s.c2 = 0.75;
  s.v0 = Vec3d(1, 0, 0);
  s.r = 0.5;
  s.tau = 0.5;
  // quadratic form 0.7, inside the blend of the positive part
  const double t = 0.05;
  const Vec3d v = s.v0 + Vec3d(0.3, 0.4, 0.3);
  const Vec3d x = t * v + Vec3d(0.2, -0.2, 0.1);
  const double r1 = std::abs(push_barrier_transport_residual(s, t, x, v, 1e-3));
  const double r2 = std::abs(push_barrier_transport_residual(s, t, x, v, 5e-4));
  CHECK(r1 > 0.0);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));

  PushBarrierSpec pure = s;
  pure.c1 = 0.0;
  CHECK(std::abs(push_barrier_transport_residual(pure, t, x, v, 1e-4)) < 1e-5);
}

TEST_CASE("push admissible region") {
  const auto p = make_kernel(-1.0, 0.5);
  PushBarrierSpec s;
  s.v0 = Vec3d::Zero();
  s.r = 1.0;
  s.tau = 1.0;
  const auto reg = push_admissible_region(s, p, 0.02);
  CHECK(reg.time_bound == doctest::Approx(0.02));
  CHECK(reg.contains(0.01, Vec3d::Zero(), Vec3d::Zero()));
  const Vec3d v(0.5, 0, 0);  // |v - v0| = r / (2 tau)
  CHECK_FALSE(reg.contains(0.01, 0.01 * v, v));
  CHECK_FALSE(reg.contains(0.03, Vec3d::Zero(), Vec3d::Zero()));
  CHECK_THROWS_AS(push_admissible_region(s, p, 0.0), ConfigError);
}

TEST_CASE("push barrier constants from a mass core") {
  const auto p = make_kernel(0.0, 0.5);
  const auto s = PushBarrierSpec::from_mass_core(1.0, 0.5, 0.5, Vec3d::Zero(), Vec3d(1, 0, 0), p, 2.0);
  CHECK(s.c2 == doctest::Approx(0.75));
  // c1 = 2 Lambda <|v0| + r/tau>^1 c2 tau r^-1
  CHECK(s.c1 == doctest::Approx(2.0 * 2.0 * std::sqrt(5.0) * 0.75 * 0.5 / 0.5));
}

TEST_CASE("cutoffs") {
  const VelocityCutoff phi{0.25};
  CHECK(phi.inner() == doctest::Approx(std::sqrt(2.0) * 0.75));
  CHECK(phi.outer() == doctest::Approx(std::sqrt(2.0) * 0.875));
  CHECK(phi(Vec3d(1.0, 0, 0)) == 1.0);
  CHECK(phi(Vec3d(1.3, 0, 0)) == 0.0);
  const SpaceCutoff psi{2.0};
  CHECK(psi(Vec3d(0.9, 0, 0)) == 1.0);
  CHECK(psi(Vec3d(2.1, 0, 0)) == 0.0);

  const auto cert = sample_cutoff_bounds(0.25, 0.5, 10000, 3);
  CHECK(cert.hessian_violations == 0);
  CHECK(cert.gradient_violations == 0);
  CHECK(cert.max_hessian_scaled <= 10.0);
  CHECK(cert.max_gradient_scaled <= 4.0);
  CHECK(cert.max_hessian_scaled > 1.0);
}

TEST_CASE("spread barrier") {
  SpreadBarrierSpec s;
  s.params = make_kernel(0.0, 0.5);
  s.alpha = 0.5;
  s.xi = 0.25;
  s.R = 1.0;
  s.rho = 1.0;
  s.ell = 0.5;
  s.C1 = 1.0;
  const double eps = 1e-3;
  CHECK(spread_barrier_eval(s, 0.0, Vec3d::Zero(), Vec3d::Zero(), eps) == doctest::Approx(-eps));
  CHECK(spread_barrier_eval(s, 1.0, Vec3d::Zero(), Vec3d(1.3, 0, 0), eps) == doctest::Approx(-eps));
  CHECK(spread_barrier_eval(s, 1.0, Vec3d(1.1, 0, 0), Vec3d::Zero(), eps) == doctest::Approx(-eps));
  CHECK(s.gain() == doctest::Approx(0.5 * std::pow(0.25, 7.0) * 0.25));
  CHECK(s.ell_tilde(1e6) == doctest::Approx(s.gain() / s.K()));
  CHECK(spread_barrier_eval(s, 1.0, Vec3d::Zero(), Vec3d::Zero()) == doctest::Approx(s.ell_tilde(1.0)));

  for (double t : {0.0, 0.3}) {
    const double r1 = std::abs(spread_barrier_ode_residual(s, t, 1e-2));
    const double r2 = std::abs(spread_barrier_ode_residual(s, t, 5e-3));
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
  }
  CHECK(std::abs(spread_barrier_ode_residual(s, 1e3, 1e-2)) < 1e-12);
}

TEST_CASE("ordering check against constant fields") {
  PhaseFieldd f(SpaceGrid<double>::homogeneous(), VelocityGrid<double>(2.0, 8));
  const BarrierFn barrier = [](double, const Vec3d&, const Vec3d&) { return 0.5; };
  const RegionFn region = [](double, const Vec3d&, const Vec3d& v) { return v.norm() < 1.0; };

  f.values().setConstant(10.0);
  auto rows = barrier_ordering_check({f}, barrier, region, 0.0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].violations == 0);
  CHECK(rows[0].points > 0);
  CHECK(rows[0].min_gap == doctest::Approx(9.5));

  f.values().setZero();
  rows = barrier_ordering_check({f}, barrier, region, 0.0);
  CHECK(rows[0].violations == rows[0].points);
  CHECK(rows[0].min_gap == doctest::Approx(-0.5));
}
