#include "nclb/barrier/barrier.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "nclb/core/errors.hpp"

namespace nclb {

double SmoothPositivePart::value(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 0.5) return s;
  const double s3 = s * s * s;
  return s3 * (24.0 - 64.0 * s + 48.0 * s * s);
}

double SmoothPositivePart::d1(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 0.5) return 1.0;
  return s * s * (72.0 - 256.0 * s + 240.0 * s * s);
}

double SmoothPositivePart::d2(double s) {
  if (s <= 0.0 || s >= 0.5) return 0.0;
  return s * (144.0 - 768.0 * s + 960.0 * s * s);
}

double smoothstep_down(double t, int derivative) {
  if (t <= 0.0) return derivative == 0 ? 1.0 : 0.0;
  if (t >= 1.0) return 0.0;
  const double t2 = t * t;
  switch (derivative) {
    case 0: return 1.0 - t2 * t * (10.0 - 15.0 * t + 6.0 * t2);
    case 1: return -30.0 * t2 * (1.0 - t) * (1.0 - t);
    default: return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
  }
}

namespace {

constexpr double kRamp = 0.05;
constexpr double kPeak = 4.0 / (1.0 - 2.0 * kRamp);

// Antiderivatives of the unit trapezoid T on [0, 1/2]: 0 -> 1 on [0, e], 1, then 1 -> 0 on [1/2-e, 1/2].
double trap(double t) {
  if (t < kRamp) return t / kRamp;
  if (t > 0.5 - kRamp) return (0.5 - t) / kRamp;
  return 1.0;
}

double trap_int1(double t) {
  const double e = kRamp;
  if (t < e) return t * t / (2.0 * e);
  if (t <= 0.5 - e) return t - e / 2.0;
  const double u = 0.5 - t;
  return (0.5 - e) - u * u / (2.0 * e);
}

double trap_int2(double t) {
  const double e = kRamp;
  if (t < e) return t * t * t / (6.0 * e);
  if (t <= 0.5 - e) return e * e / 6.0 + (e / 2.0) * (t - e) + 0.5 * (t - e) * (t - e);
  const double u = 0.5 - t;
  // symmetric: I2(1/2) = (1/2 - e)/4 and I2(t) = I2(1/2) - I1(1/2) u + u^3 / (6e)
  return (0.5 - e) / 4.0 - (0.5 - e) * u + u * u * u / (6.0 * e);
}

}  // namespace

double trapezoid_step_down(double t, int derivative) {
  if (t <= 0.0) return derivative == 0 ? 1.0 : 0.0;
  if (t >= 1.0) return 0.0;
  // S'' = -m T(t) on [0, 1/2] and S is odd about (1/2, 1/2)
  const bool left = t <= 0.5;
  const double u = left ? t : 1.0 - t;
  switch (derivative) {
    case 0: return left ? 1.0 - kPeak * trap_int2(u) : kPeak * trap_int2(u);
    case 1: return -kPeak * trap_int1(u);
    default: return left ? -kPeak * trap(u) : kPeak * trap(u);
  }
}

double VelocityCutoff::inner() const { return std::sqrt(2.0) * (1.0 - xi); }
double VelocityCutoff::outer() const { return std::sqrt(2.0) * (1.0 - 0.5 * xi); }

double VelocityCutoff::operator()(const Vec3d& v) const {
  const double a = inner(), w = outer() - a;
  return trapezoid_step_down((v.norm() - a) / w);
}

Eigen::Matrix3d VelocityCutoff::hessian(const Vec3d& v) const {
  const double a = inner(), w = outer() - a;
  const double r = v.norm();
  const double t = (r - a) / w;
  if (t <= 0.0 || t >= 1.0 || r == 0.0) return Eigen::Matrix3d::Zero();
  const Vec3d e = v / r;
  const Eigen::Matrix3d P = e * e.transpose();
  const double d1 = trapezoid_step_down(t, 1) / w;
  const double d2 = trapezoid_step_down(t, 2) / (w * w);
  return d2 * P + (d1 / r) * (Eigen::Matrix3d::Identity() - P);
}

double SpaceCutoff::operator()(const Vec3d& x) const { return smoothstep_down(2.0 * x.norm() / rho - 1.0); }

Vec3d SpaceCutoff::gradient(const Vec3d& x) const {
  const double r = x.norm();
  if (r == 0.0) return Vec3d::Zero();
  return smoothstep_down(2.0 * r / rho - 1.0, 1) * (2.0 / rho) * (x / r);
}

void PushBarrierSpec::validate() const {
  require(c1 > 0.0 && c2 > 0.0, "PushBarrierSpec: c1 > 0 and c2 > 0");
  require(r > 0.0 && tau > 0.0 && tau <= 1.0, "PushBarrierSpec: r > 0 and 0 < tau <= 1");
}

PushBarrierSpec PushBarrierSpec::from_mass_core(double delta, double r, double tau, const Vec3d& x0, const Vec3d& v0,
                                                const KernelParams& params, double Lambda) {
  require(delta > 0.0, "PushBarrierSpec: delta > 0");
  require(Lambda > 0.0, "PushBarrierSpec: Lambda > 0");
  PushBarrierSpec b;
  b.x0 = x0;
  b.v0 = v0;
  b.r = r;
  b.tau = tau;
  b.c2 = 0.75 * delta;
  const double two_s = 2.0 * params.s;
  b.c1 = 2.0 * Lambda * std::pow(japanese(v0.norm() + r / tau), params.gamma_2s_plus()) * b.c2 *
         std::pow(tau, two_s) * std::pow(r, -two_s);
  b.validate();
  return b;
}

double push_barrier_eval(const PushBarrierSpec& spec, double t, const Vec3d& x, const Vec3d& v) {
  const double r2 = spec.r * spec.r;
  const double arg = 1.0 - (v - spec.v0).squaredNorm() * spec.tau * spec.tau / r2 -
                     (x - spec.x0 - t * v).squaredNorm() / r2;
  return -spec.c1 * t + spec.c2 * SmoothPositivePart::value(arg);
}

double push_barrier_transport_residual(const PushBarrierSpec& spec, double t, const Vec3d& x, const Vec3d& v,
                                       double h) {
  require(h > 0.0, "push_barrier_transport_residual: h > 0");
  double acc = (push_barrier_eval(spec, t + h, x, v) - push_barrier_eval(spec, t - h, x, v)) / (2.0 * h);
  for (int a = 0; a < 3; ++a) {
    const Vec3d e = h * Vec3d::Unit(a);
    acc += v[a] * (push_barrier_eval(spec, t, x + e, v) - push_barrier_eval(spec, t, x - e, v)) / (2.0 * h);
  }
  return acc + spec.c1;
}

bool PushRegion::contains(double t, const Vec3d& x, const Vec3d& v) const {
  if (t < 0.0 || t >= time_bound) return false;
  const double r2 = spec.r * spec.r;
  return (v - spec.v0).squaredNorm() * spec.tau * spec.tau / r2 + (x - spec.x0 - t * v).squaredNorm() / r2 < 0.25;
}

PushRegion push_admissible_region(const PushBarrierSpec& spec, const KernelParams& params, double C_push) {
  spec.validate();
  require(C_push > 0.0, "push_admissible_region: C_push > 0");
  PushRegion reg;
  reg.spec = spec;
  const double two_s = 2.0 * params.s;
  const double bound = C_push * std::pow(spec.r, two_s) /
                       (std::pow(spec.tau, two_s) *
                        std::pow(japanese(spec.v0.norm() + spec.r / spec.tau), params.gamma_2s_plus()));
  reg.time_bound = std::min(bound, spec.tau);
  return reg;
}

double SpreadBarrierSpec::K() const {
  return 4.0 * std::sqrt(2.0) * R / rho +
         C1 * std::pow(japanese(std::sqrt(2.0) * R), params.gamma_2s_plus()) * std::pow(R * xi, -2.0 * params.s);
}

double SpreadBarrierSpec::gain() const { return alpha * std::pow(xi, q()) * std::pow(R, 3.0 + params.gamma) * ell * ell; }

double SpreadBarrierSpec::ell_tilde(double t) const {
  const double k = K();
  return gain() * (-std::expm1(-k * t)) / k;
}

void SpreadBarrierSpec::validate() const {
  params.validate();
  require(alpha > 0.0 && alpha <= 1.0, "SpreadBarrierSpec: 0 < alpha <= 1");
  require(xi > 0.0 && xi < 1.0 - 1.0 / std::sqrt(2.0), "SpreadBarrierSpec: 0 < xi < 1 - 1/sqrt(2)");
  require(R >= 1.0, "SpreadBarrierSpec: R >= 1");
  require(rho > 0.0 && rho <= 1.0, "SpreadBarrierSpec: 0 < rho <= 1");
  require(ell > 0.0 && ell <= 1.0, "SpreadBarrierSpec: 0 < ell <= 1");
  require(C1 > 0.0, "SpreadBarrierSpec: C1 > 0");
  require(std::pow(xi, q()) * std::pow(R, 3.0 + params.gamma) * ell < 0.5,
          "SpreadBarrierSpec: xi^q R^(3+gamma) ell < 1/2");
}

double spread_barrier_eval(const SpreadBarrierSpec& spec, double t, const Vec3d& x, const Vec3d& v, double epsilon) {
  spec.validate();
  const VelocityCutoff phi{spec.xi};
  const SpaceCutoff psi{spec.rho};
  return spec.ell_tilde(t) * phi(v / spec.R) * psi(x) - epsilon;
}

double spread_barrier_ode_residual(const SpreadBarrierSpec& spec, double t, double h) {
  require(h > 0.0, "spread_barrier_ode_residual: h > 0");
  const double deriv = (spec.ell_tilde(t + h) - spec.ell_tilde(t - h)) / (2.0 * h);
  return deriv - (spec.gain() - spec.K() * spec.ell_tilde(t));
}

double spread_lower_bound(double c, double xi, double R, double rho, double ell, double t,
                          const KernelParams& params) {
  const double two_s = 2.0 * params.s;
  const double cap = std::pow(R, two_s - params.gamma_2s_plus()) * std::pow(xi, two_s) + rho / R;
  return c * std::pow(xi, params.spread_exponent()) * std::pow(R, 3.0 + params.gamma) * ell * ell * std::min(t, cap);
}

CutoffCertificate sample_cutoff_bounds(double xi, double rho, int n, std::uint64_t seed) {
  require(n > 0, "sample_cutoff_bounds: n > 0");
  const VelocityCutoff phi{xi};
  const SpaceCutoff psi{rho};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  auto direction = [&] {
    Vec3d d(gauss(rng), gauss(rng), gauss(rng));
    return Vec3d(d / d.norm());
  };
  CutoffCertificate cert;
  for (int i = 0; i < n; ++i) {
    // three quarters of the samples land in the transition shells
    const bool shell = (i % 4) != 0;
    const double rv = shell ? phi.inner() + unit(rng) * (phi.outer() - phi.inner()) : unit(rng) * 1.5;
    const double rx = shell ? rho * (0.5 + 0.5 * unit(rng)) : unit(rng) * 1.2 * rho;
    const Eigen::Matrix3d H = phi.hessian(rv * direction());
    const double hn = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(H).eigenvalues().cwiseAbs().maxCoeff();
    const double gn = psi.gradient(rx * direction()).norm();
    cert.max_hessian_scaled = std::max(cert.max_hessian_scaled, hn * xi * xi);
    cert.max_gradient_scaled = std::max(cert.max_gradient_scaled, gn * rho);
    if (hn > 10.0 / (xi * xi)) ++cert.hessian_violations;
    if (gn > 4.0 / rho) ++cert.gradient_violations;
  }
  return cert;
}

std::vector<OrderingRow> barrier_ordering_check(const std::vector<PhaseFieldd>& trajectory, const BarrierFn& barrier,
                                                const RegionFn& region, double tolerance, double x_centre) {
  require(tolerance >= 0.0, "barrier_ordering_check: tolerance >= 0");
  std::vector<OrderingRow> rows;
  for (const auto& f : trajectory) {
    OrderingRow row;
    row.t = f.time();
    row.min_gap = std::numeric_limits<double>::infinity();
    const auto& xg = f.x_grid();
    for (int ix = 0; ix < f.n_x(); ++ix) {
      const double xs = x_centre + xg.separation(xg.coord(ix), x_centre);
      const Vec3d x(xs, 0.0, 0.0);
      for (std::size_t iv = 0; iv < f.block_size(); ++iv) {
        const Vec3d v = f.v_grid().node(iv);
        if (!region(row.t, x, v)) continue;
        ++row.points;
        const double gap = f(ix, iv) - barrier(row.t, x, v);
        if (gap < -tolerance) ++row.violations;
        if (gap < row.min_gap) {
          row.min_gap = gap;
          row.argmin_x = xs;
          row.argmin_v = v;
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_ordering_csv(std::ostream& out, const std::vector<OrderingRow>& rows) {
  out << "t,min_gap,argmin_x,argmin_vx,argmin_vy,argmin_vz,points,violations\n";
  out.precision(10);
  for (const auto& r : rows)
    out << r.t << ',' << r.min_gap << ',' << r.argmin_x << ',' << r.argmin_v[0] << ',' << r.argmin_v[1] << ','
        << r.argmin_v[2] << ',' << r.points << ',' << r.violations << '\n';
}

}  // namespace nclb
