#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nclb/core/grid.hpp"
#include "nclb/core/kernel_params.hpp"
#include "nclb/core/phase_field.hpp"

namespace nclb {

/// C^2 positive part: 0 for s <= 0, s for s >= 1/2, and the quintic
/// 24 s^3 - 64 s^4 + 48 s^5 in between (value, slope and curvature match at both ends).
struct SmoothPositivePart {
  static double value(double s);
  static double d1(double s);
  static double d2(double s);
};

/// Quintic smoothstep 1 -> 0 on [0, 1] with zero slope and curvature at the ends.
double smoothstep_down(double t, int derivative = 0);

/// Radial C^2 profile 1 -> 0 on [0, 1] whose second derivative is a
/// trapezoid (ramps of width 0.05); |S''| <= 4/0.9 and |S'| <= 2.
double trapezoid_step_down(double t, int derivative = 0);

/// phi_xi: 1 on B_{sqrt2 (1-xi)}, 0 outside B_{sqrt2 (1-xi/2)}.
struct VelocityCutoff {
  double xi = 0.25;

  double inner() const;
  double outer() const;
  double operator()(const Vec3d& v) const;
  Eigen::Matrix3d hessian(const Vec3d& v) const;
};

/// psi_rho: 1 on B_{rho/2}, 0 outside B_rho, radially decreasing.
struct SpaceCutoff {
  double rho = 1.0;

  double operator()(const Vec3d& x) const;
  Vec3d gradient(const Vec3d& x) const;
};

struct PushBarrierSpec {
  double c1 = 1.0;
  double c2 = 1.0;
  Vec3d x0 = Vec3d::Zero();
  Vec3d v0 = Vec3d::Zero();
  double r = 1.0;
  double tau = 1.0;

  void validate() const;

  /// c2 = 3 delta / 4 and c1 = 2 Lambda <|v0| + r/tau>^((gamma+2s)_+) c2 tau^(2s) r^(-2s).
  static PushBarrierSpec from_mass_core(double delta, double r, double tau, const Vec3d& x0, const Vec3d& v0,
                                        const KernelParams& params, double Lambda);
};

/// -c1 t + c2 psi(1 - |v-v0|^2 tau^2 / r^2 - |x-x0-tv|^2 / r^2)
double push_barrier_eval(const PushBarrierSpec& spec, double t, const Vec3d& x, const Vec3d& v);

/// Central-difference (d_t + v . grad_x) of the push barrier plus c1; exactly 0 in exact arithmetic.
double push_barrier_transport_residual(const PushBarrierSpec& spec, double t, const Vec3d& x, const Vec3d& v,
                                       double h);

struct PushRegion {
  PushBarrierSpec spec;
  /// C r^(2s) / (tau^(2s) <|v0| + r/tau>^((gamma+2s)_+)), further capped by tau
  double time_bound = 0.0;

  /// |v-v0|^2 tau^2/r^2 + |x-x0-tv|^2/r^2 < 1/4 and t < time_bound
  bool contains(double t, const Vec3d& x, const Vec3d& v) const;
};

PushRegion push_admissible_region(const PushBarrierSpec& spec, const KernelParams& params, double C_push);

struct SpreadBarrierSpec {
  double alpha = 0.5;
  double xi = 0.25;
  double R = 1.0;
  double rho = 1.0;
  double ell = 0.5;
  double C1 = 1.0;
  KernelParams params;

  double q() const { return params.spread_exponent(); }
  /// 4 sqrt2 R / rho + C1 <sqrt2 R>^((gamma+2s)_+) (R xi)^(-2s)
  double K() const;
  /// alpha xi^q R^(3+gamma) ell^2
  double gain() const;
  /// gain (1 - e^(-K t)) / K
  double ell_tilde(double t) const;

  void validate() const;
};

/// ell_tilde(t) phi_xi(v/R) psi_rho(x) - epsilon
double spread_barrier_eval(const SpreadBarrierSpec& spec, double t, const Vec3d& x, const Vec3d& v,
                           double epsilon = 0.0);

/// Central difference of ell_tilde at t minus (gain - K ell_tilde(t)).
double spread_barrier_ode_residual(const SpreadBarrierSpec& spec, double t, double h);

/// c xi^q R^(3+gamma) ell^2 min{t, R^(2s-(gamma+2s)_+) xi^(2s) + rho / R}
double spread_lower_bound(double c, double xi, double R, double rho, double ell, double t,
                          const KernelParams& params);

struct CutoffCertificate {
  double max_hessian_scaled = 0.0;   // max |D^2 phi_xi| xi^2
  double max_gradient_scaled = 0.0;  // max |grad psi_rho| rho
  int hessian_violations = 0;        // samples with |D^2 phi_xi| > 10 xi^-2
  int gradient_violations = 0;       // samples with |grad psi_rho| > 4 rho^-1
};

/// Samples both cutoffs at n random points of their transition shells and the surrounding balls.
CutoffCertificate sample_cutoff_bounds(double xi, double rho, int n, std::uint64_t seed);

struct OrderingRow {
  double t = 0.0;
  double min_gap = 0.0;  // min over the region of f - barrier (+inf if the region is empty)
  double argmin_x = 0.0;
  Vec3d argmin_v = Vec3d::Zero();
  int points = 0;
  int violations = 0;  // gap < -tolerance
};

using BarrierFn = std::function<double(double t, const Vec3d& x, const Vec3d& v)>;
using RegionFn = std::function<bool(double t, const Vec3d& x, const Vec3d& v)>;

/// Scans every grid point of every snapshot inside the region. A spatial node x
/// enters as (x_centre + sep(x, x_centre), 0, 0), its periodic image nearest to x_centre.
std::vector<OrderingRow> barrier_ordering_check(const std::vector<PhaseFieldd>& trajectory, const BarrierFn& barrier,
                                                const RegionFn& region, double tolerance, double x_centre = 0.0);

/// t,min_gap,argmin_x,argmin_vx,argmin_vy,argmin_vz,points,violations
void write_ordering_csv(std::ostream& out, const std::vector<OrderingRow>& rows);

}  // namespace nclb
