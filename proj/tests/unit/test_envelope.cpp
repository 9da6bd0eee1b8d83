#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "nclb/envelope/iteration.hpp"
#include "nclb/envelope/theorem.hpp"

using namespace nclb;

namespace {

IterationConfig reference_config() {
  IterationConfig c;
  c.T0 = 1.0;
  c.c_spread = 1.0;
  c.ell0 = 0.5;
  c.levels = 30;
  c.params = make_kernel(0.0, 0.5);
  return c;
}

IterationTrace constructed_trace(double log_u, int levels) {
  IterationTrace tr;
  tr.config = reference_config();
  for (int n = 0; n <= levels; ++n) {
    IterationLevel l;
    l.n = n;
    l.R = std::pow(std::sqrt(2.0), n);
    l.log_ell = std::ldexp(log_u, n);
    tr.levels.push_back(l);
  }
  return tr;
}

}  // namespace

TEST_CASE("spreading exponent") {
  CHECK(make_kernel(0.0, 0.5).spread_exponent() == 7.0);
  CHECK(run_iteration(reference_config()).q == 7.0);
}

TEST_CASE("iteration matches a direct evaluation of the recursion") {
  const auto tr = run_iteration(reference_config());
  REQUIRE(tr.levels.size() == 31);
  CHECK(tr.levels[1].R == doctest::Approx(std::sqrt(2.0) * 0.75));
  CHECK(tr.levels[2].R == doctest::Approx(std::sqrt(2.0) * 0.875 * std::sqrt(2.0) * 0.75));
  CHECK(tr.levels[2].R == doctest::Approx(1.3125));

  // plain arithmetic, first levels only (before underflow)
  double R = 1.0, ell = 0.5;
  for (int n = 0; n <= 4; ++n) {
    const double xi = std::pow(0.5, n + 1), rho = std::pow(0.5, n);
    if (n > 0) R *= std::sqrt(2.0) * (1.0 - xi);
    CHECK(tr.levels[n].R == doctest::Approx(R));
    CHECK(tr.levels[n].log_ell == doctest::Approx(std::log(ell)));
    CHECK(tr.levels[n].T == doctest::Approx(1.0 - std::pow(0.5, n)));
    const double cap = std::pow(xi, 1.0) + rho / R;  // R^(2s - (gamma+2s)_+) = R^0
    ell = std::min(1.0, std::pow(xi, 7.0) * std::pow(R, 3.0) * ell * ell * std::min(std::pow(0.5, n + 1), cap));
  }
}

TEST_CASE("zero seed mass stays zero") {
  auto c = reference_config();
  c.ell0 = 0.0;
  const auto tr = run_iteration(c);
  for (const auto& l : tr.levels) CHECK(std::isinf(l.log_ell));
  CHECK(tr.ell(5) == 0.0);
}

TEST_CASE("smallness holds at every level") {
  const auto tr = run_iteration(reference_config());
  CHECK(tr.smallness_holds());
  for (const auto& l : tr.levels) {
    CHECK(l.log_smallness < std::log(0.5));
    CHECK(l.log_smallness <= l.log_smallness_bound + 1e-12);
  }
}

TEST_CASE("double-exponential fit") {
  CHECK(fit_double_exponential(constructed_trace(std::log(0.5), 10)) == doctest::Approx(0.5));

  const auto tr = run_iteration(reference_config());
  const double lu = fit_log_double_exponential(tr);
  for (const auto& l : tr.levels) CHECK(l.log_ell >= std::ldexp(lu, l.n) - 1e-9 * std::abs(l.log_ell));
  // frozen regression value of the reference trace
  CHECK(std::exp(lu) == doctest::Approx(1.2279566047889919e-05).epsilon(1e-12));

  const double slope = double_exponential_slope(tr, 6, 12);
  CHECK(std::abs(slope - std::log(2.0)) / std::log(2.0) < 0.05);
}

TEST_CASE("iteration runtime") {
  const auto start = std::chrono::steady_clock::now();
  const auto tr = run_iteration(reference_config());
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(tr.levels.size() == 31);
  CHECK(sec < 1.0);
}

TEST_CASE("certificate from the reference trace") {
  const auto tr = run_iteration(reference_config());
  const auto c = certificate_from_trace(tr, 1.0, Vec3d::Zero());
  CHECK_FALSE(c.degenerate);
  CHECK(c.u == doctest::Approx(1.2279566047889919e-05).epsilon(1e-12));
  CHECK(c.mu() == doctest::Approx(c.u));
  CHECK(c.eta == doctest::Approx(67.7924).epsilon(1e-5));
  CHECK(c.C_R == doctest::Approx(0.577576).epsilon(1e-5));
  // the Gaussian stays below ell_n on every shell R_(n-1) < |v| <= R_n
  for (std::size_t n = 0; n < tr.levels.size(); ++n) {
    const double inner = n == 0 ? 0.0 : tr.levels[n - 1].R;
    CHECK(tr.levels[n].log_ell >= c.log_bound(Vec3d(inner, 0, 0)) - 1e-9);
  }
  CHECK(trace_digest(tr) == trace_digest(run_iteration(reference_config())));
}

TEST_CASE("certificate degenerates as u tends to one") {
  const auto c = certificate_from_trace(constructed_trace(-1e-14, 10), 1.0, Vec3d::Zero());
  CHECK(c.degenerate);
  CHECK(c.eta < 1e-12);
}

TEST_CASE("theorem config") {
  TheoremConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // Lambda missing
  c.Lambda = 2.0;
  c.validate();
  CHECK(c.push_constant() == doctest::Approx(1.0 / 48.0));
  c.C_push = 0.1;
  CHECK(c.push_constant() == 0.1);
  c.restart_margin = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("orchestration refuses data without a mass core") {
  const auto p = make_kernel(-1.0, 0.5);
  const VelocityGrid<double> vg(2.5, 12);
  PhaseFieldd f0(SpaceGrid<double>::homogeneous(), vg);
  SolverConfig sc;
  sc.dt = 0.05;
  sc.t_end = 0.05;
  const Solver solver(p, vg, sc);
  TheoremConfig tc;
  tc.Lambda = 1.97146;
  tc.T = 0.05;
  try {
    orchestrate_theorem(f0, solver, p, tc);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("no mass core") != std::string::npos);
  }
}
