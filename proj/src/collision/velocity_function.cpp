#include "nclb/collision/velocity_function.hpp"

#include <cmath>
#include <numbers>

namespace nclb {

VelocityFunction VelocityFunction::scaled(double a) const {
  VelocityFunction out = *this;
  auto inner = eval;
  out.eval = [inner, a](const Vec3d& v) { return a * inner(v); };
  return out;
}

VelocityFunction bump(const Vec3d& centre, double R, double amp, int power) {
  VelocityFunction f;
  f.eval = [=](const Vec3d& v) {
    const double t = 1.0 - (v - centre).squaredNorm() / (R * R);
    return t > 0.0 ? amp * std::pow(t, power) : 0.0;
  };
  f.centre = centre;
  f.radius = R;
  f.label = "bump";
  return f;
}

VelocityFunction maxwellian(double rho, const Vec3d& u, double T) {
  VelocityFunction f;
  const double norm = rho * std::pow(2.0 * std::numbers::pi * T, -1.5);
  f.eval = [=](const Vec3d& v) { return norm * std::exp(-(v - u).squaredNorm() / (2.0 * T)); };
  f.centre = u;
  f.radius = std::sqrt(2.0 * T * 40.0);
  f.label = "maxwellian";
  return f;
}

VelocityFunction ball_indicator(const Vec3d& centre, double r, double amp) {
  VelocityFunction f;
  f.eval = [=](const Vec3d& v) { return (v - centre).squaredNorm() < r * r ? amp : 0.0; };
  f.centre = centre;
  f.radius = r;
  f.label = "ball";
  return f;
}

VelocityFunction gaussian(const Vec3d& centre, double width, double amp) {
  VelocityFunction f;
  f.eval = [=](const Vec3d& v) { return amp * std::exp(-(v - centre).squaredNorm() / (2.0 * width * width)); };
  f.centre = centre;
  f.radius = 9.0 * width;
  f.label = "gaussian";
  return f;
}

VelocityFunction constant(double value) {
  VelocityFunction f;
  f.eval = [value](const Vec3d&) { return value; };
  f.label = "constant";
  return f;
}

VelocityFunction zero() {
  VelocityFunction f;
  f.eval = [](const Vec3d&) { return 0.0; };
  f.radius = 0.0;
  f.label = "zero";
  return f;
}

VelocityFunction square_norm() {
  VelocityFunction f;
  f.eval = [](const Vec3d& v) { return v.squaredNorm(); };
  f.label = "square_norm";
  return f;
}

VelocityFunction interpolant(const PhaseFieldd& field, int ix) {
  VelocityFunction f;
  const PhaseFieldd* p = &field;
  f.eval = [p, ix](const Vec3d& v) { return p->interpolate(ix, v); };
  f.centre = Vec3d::Zero();
  f.radius = std::sqrt(3.0) * (field.v_grid().extent() + field.v_grid().spacing());
  f.label = "grid";
  return f;
}

}  // namespace nclb
