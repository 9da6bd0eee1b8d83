#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nclb/collision/velocity_function.hpp"
#include "nclb/core/diagnostics.hpp"
#include "nclb/core/field_io.hpp"
#include "nclb/core/registry.hpp"

using namespace nclb;

namespace {

PhaseFieldd homogeneous(double L, int n) { return PhaseFieldd(SpaceGrid<double>::homogeneous(), VelocityGrid<double>(L, n)); }

double maxwell(const Vec3d& v) { return std::pow(2.0 * std::numbers::pi, -1.5) * std::exp(-0.5 * v.squaredNorm()); }

// closed form of int (1 - |v|^2)_+^4 dv over R^3: 4 pi * B(3/2, 5) / 2
constexpr double bump_mass = 4.0 * std::numbers::pi * 384.0 / 10395.0;

}  // namespace

TEST_CASE("velocity grid nodes sit at cell centres") {
  VelocityGrid<double> g(2.0, 8);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.coord(0) == doctest::Approx(-1.75));
  CHECK(g.coord(7) == doctest::Approx(1.75));
  CHECK(g.node(g.index(1, 2, 3)).isApprox(g.node(1, 2, 3)));
  CHECK_THROWS_AS(VelocityGrid<double>(2.0, 4), ConfigError);
}

TEST_CASE("periodic separation is the shortest signed distance") {
  const auto xg = SpaceGrid<double>::periodic(1.0, 10);
  CHECK(xg.separation(0.9, 0.1) == doctest::Approx(-0.2));
  CHECK(xg.separation(0.1, 0.9) == doctest::Approx(0.2));
  CHECK(SpaceGrid<double>::homogeneous().separation(0.3, 0.0) == 0.0);
}

TEST_CASE("moments of the zero field vanish") {
  const auto f = homogeneous(4.0, 8);
  const auto m = moment_weighted(f, make_kernel(0.0, 0.5));
  CHECK(m.sup.mass == 0.0);
  CHECK(m.sup.energy == 0.0);
  CHECK(m.sup.weighted == 0.0);
}

TEST_CASE("standard Maxwellian has unit mass and energy 3") {
  auto f = homogeneous(8.0, 32);
  f.fill([](double, const Vec3d& v) { return maxwell(v); });
  const auto m = moment_weighted(f, make_kernel(0.0, 0.5));
  CHECK(m.sup.mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.sup.energy == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(m.sup.weighted == doctest::Approx(4.0).epsilon(1e-6));

  f.values() *= 2.0;
  const auto m2 = moment_weighted(f, make_kernel(0.0, 0.5));
  CHECK(m2.sup.mass == doctest::Approx(2.0 * m.sup.mass));
  CHECK(m2.sup.energy == doctest::Approx(2.0 * m.sup.energy));
}

TEST_CASE("midpoint moments converge at second order for a smooth bump") {
  const auto b = bump(Vec3d::Zero(), 1.0);
  auto err = [&](int n) {
    auto f = homogeneous(1.0, n);
    f.fill([&](double, const Vec3d& v) { return b(v); });
    return std::abs(moment_weighted(f, make_kernel(0.0, 0.5)).sup.mass - bump_mass);
  };
  const double e1 = err(16), e2 = err(32);
  CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("Lp norm of a ball indicator") {
  auto f = homogeneous(1.0, 8);
  CHECK(lp_norm(f, 2.0)[0] == 0.0);
  CHECK_THROWS_AS(lp_norm(f, std::numeric_limits<double>::infinity()), ConfigError);

  auto g = homogeneous(1.0, 64);
  const double delta = 0.7, r = 0.6, p = 2.0;
  g.fill([&](double, const Vec3d& v) { return v.norm() < r ? delta : 0.0; });
  const double exact = delta * std::pow(4.0 * std::numbers::pi * r * r * r / 3.0, 1.0 / p);
  CHECK(lp_norm(g, p)[0] == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("mass core search") {
  auto f = homogeneous(2.0, 16);
  CHECK_FALSE(check_mass_core(f, 1.0, 0.25).has_value());

  f.fill([](double, const Vec3d& v) { return v.norm() < 0.5 ? 1.0 : 0.0; });
  const auto core = check_mass_core(f, 1.0, 0.5);
  REQUIRE(core.has_value());
  CHECK(core->x0 == 0.0);
  CHECK(core->v0.norm() == doctest::Approx(0.0));

  auto m = homogeneous(4.0, 16);
  m.fill([](double, const Vec3d& v) { return maxwell(v); });
  const auto mc = check_mass_core(m, 0.01, 0.5);
  REQUIRE(mc.has_value());
  CHECK(mc->v0.norm() < 0.5);
}

TEST_CASE("well-distributed check") {
  const auto xg = SpaceGrid<double>::periodic(1.0, 8);
  PhaseFieldd f(xg, VelocityGrid<double>(2.0, 8));
  f.fill([](double, const Vec3d& v) { return v.norm() < 1.0 ? 1.0 : 0.0; });
  const auto all = check_well_distributed(f, 0.5, 0.5, 0.25);
  CHECK(all.ok);
  for (const auto& w : all.witness) {
    REQUIRE(w.has_value());
    CHECK(w->v0.norm() < 0.5);
  }

  PhaseFieldd half(xg, VelocityGrid<double>(2.0, 8));
  half.fill([](double x, const Vec3d& v) { return x < 0.25 && v.norm() < 1.0 ? 1.0 : 0.0; });
  const auto rep = check_well_distributed(half, 0.25, 0.5, 0.25);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.failures.empty());
}

TEST_CASE("field snapshots round-trip bit-exactly") {
  const auto xg = SpaceGrid<double>::periodic(1.0, 3);
  PhaseFieldd f(xg, VelocityGrid<double>(1.5, 8), 0.25);
  f.fill([](double x, const Vec3d& v) { return std::sin(3.0 * x) + v.squaredNorm(); });
  std::stringstream buf;
  write_field(buf, f);
  const auto g = read_field(buf);
  CHECK(g.time() == 0.25);
  CHECK(g.x_grid().n() == 3);
  CHECK(g.v_grid() == f.v_grid());
  CHECK((g.values() == f.values()).all());

  std::stringstream junk("not a field");
  CHECK_THROWS(read_field(junk));
}

TEST_CASE("constants registry keeps provenance") {
  ConstantsRegistry reg;
  reg.set("Lambda", 2.0, Provenance::measured);
  CHECK(reg.get("Lambda") == 2.0);
  CHECK(std::string(to_string(reg.provenance("Lambda"))) == "empirically-measured");
  CHECK_THROWS_AS(reg.get("C_push"), ConfigError);
  CHECK_THROWS_AS(reg.set("C_push", -1.0), ConfigError);
}
