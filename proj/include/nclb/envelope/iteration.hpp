#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nclb/core/grid.hpp"
#include "nclb/core/kernel_params.hpp"

namespace nclb {

/// Spreading iteration in rescaled variables. Level n holds the bound ell_n on
/// [t_offset + T_n, t_offset + T0] x B_{rho_n} x B_{R_n}.
struct IterationConfig {
  double T0 = 1.0;
  double t_offset = 0.0;
  double c_spread = 1.0;
  double ell0 = 0.5;
  /// used instead of ell0 when finite, for initial levels below the double range
  double log_ell0 = std::numeric_limits<double>::quiet_NaN();
  int levels = 30;
  KernelParams params;

  void validate() const;
};

struct IterationLevel {
  int n = 0;
  double T = 0.0;
  double xi = 0.5;
  double rho = 1.0;
  double R = 1.0;
  double log_ell = 0.0;
  /// logs of xi_n^q R_n^(3+gamma) ell_n and of the bound (2^-n)^(q-(3+gamma)/2)
  double log_smallness = 0.0;
  double log_smallness_bound = 0.0;
};

struct IterationTrace {
  IterationConfig config;
  double q = 0.0;
  std::vector<IterationLevel> levels;
  /// first level whose ell_n is not representable as a double (-1 if none)
  int underflow_level = -1;

  double ell(int n) const;
  /// xi_n^q R_n^(3+gamma) ell_n <= bound at every level, and < 1/2
  bool smallness_holds() const;
};

/// ell_{n+1} = c xi_n^q R_n^(3+gamma) ell_n^2 min{T_{n+1} - T_n, R_n^(2s-(gamma+2s)_+) xi_n^(2s) + rho_n / R_n},
/// evaluated in log space and clamped to ell_n <= 1.
IterationTrace run_iteration(const IterationConfig& cfg);

/// u = min_n ell_n^(2^-n), the largest u with ell_n >= u^(2^n) on the trace.
double fit_double_exponential(const IterationTrace& trace);

/// log u, finite even when u itself is below the double range.
double fit_log_double_exponential(const IterationTrace& trace);

/// Least-squares slope of log log(1/ell_n) against n over [n_lo, n_hi].
double double_exponential_slope(const IterationTrace& trace, int n_lo, int n_hi);

/// f >= exp(log_mu - eta |v - v_c|^2) for t in [t_lo, t_hi], |x - x_c| < x_radius, |v - v_c| <= v_radius.
struct EnvelopeCertificate {
  double log_mu = 0.0;
  double eta = 0.0;
  Vec3d v_c = Vec3d::Zero();
  double t_lo = 0.0;
  double t_hi = 0.0;
  double x_c = 0.0;
  double x_radius = 0.0;
  double v_radius = 0.0;
  bool degenerate = false;
  /// fitted u, C_R = min_n R_n 2^(-n/2), levels used and a digest of the log ell_n values
  double u = 0.0;
  double C_R = 0.0;
  int levels = 0;
  std::uint64_t trace_digest = 0;
  std::string provenance;

  double mu() const;
  double log_bound(const Vec3d& v) const;
};

/// Gaussian bound from a trace in variables rescaled by r around v0:
/// mu = r^-(3+gamma) u and eta = 2 log(1/u) / (C_R r)^2. The x-region is left
/// at radius r about x_c = 0; callers place it.
EnvelopeCertificate certificate_from_trace(const IterationTrace& trace, double r, const Vec3d& v0);

/// 64-bit FNV-1a over the bytes of the log ell_n values.
std::uint64_t trace_digest(const IterationTrace& trace);

}  // namespace nclb
