#include "nclb/envelope/iteration.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "nclb/core/errors.hpp"

namespace nclb {

void IterationConfig::validate() const {
  params.validate();
  require(T0 > 0.0, "IterationConfig: T0 > 0");
  require(c_spread > 0.0, "IterationConfig: c_spread > 0");
  require(ell0 >= 0.0 && ell0 <= 1.0, "IterationConfig: 0 <= ell0 <= 1");
  require(std::isnan(log_ell0) || log_ell0 <= 0.0, "IterationConfig: log_ell0 <= 0");
  require(levels >= 1 && levels <= 60, "IterationConfig: 1 <= levels <= 60");
}

double IterationTrace::ell(int n) const { return std::exp(levels.at(n).log_ell); }

bool IterationTrace::smallness_holds() const {
  for (const auto& l : levels)
    if (!(l.log_smallness <= l.log_smallness_bound + 1e-12) || !(l.log_smallness < -std::log(2.0))) return false;
  return true;
}

IterationTrace run_iteration(const IterationConfig& cfg) {
  cfg.validate();
  IterationTrace tr;
  tr.config = cfg;
  const KernelParams& p = cfg.params;
  tr.q = p.spread_exponent();
  const double two_s = 2.0 * p.s;
  const double log_floor = std::log(std::numeric_limits<double>::denorm_min());

  IterationLevel lv;
  if (std::isfinite(cfg.log_ell0))
    lv.log_ell = cfg.log_ell0;
  else
    lv.log_ell = cfg.ell0 > 0.0 ? std::log(cfg.ell0) : -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= cfg.levels; ++n) {
    lv.n = n;
    lv.T = (1.0 - std::ldexp(1.0, -n)) * cfg.T0;
    lv.xi = std::ldexp(1.0, -(n + 1));
    lv.rho = std::ldexp(1.0, -n);
    if (n > 0) lv.R = std::sqrt(2.0) * (1.0 - lv.xi) * tr.levels.back().R;
    const double log_pre = tr.q * std::log(lv.xi) + (3.0 + p.gamma) * std::log(lv.R);
    lv.log_smallness = log_pre + lv.log_ell;
    lv.log_smallness_bound = -n * std::log(2.0) * (tr.q - 0.5 * (3.0 + p.gamma));
    tr.levels.push_back(lv);
    if (tr.underflow_level < 0 && lv.log_ell < log_floor) tr.underflow_level = n;
    if (n == cfg.levels) break;

    const double dT = std::ldexp(1.0, -(n + 1)) * cfg.T0;
    const double cap = std::pow(lv.R, two_s - p.gamma_2s_plus()) * std::pow(lv.xi, two_s) + lv.rho / lv.R;
    const double next = std::log(cfg.c_spread) + log_pre + 2.0 * lv.log_ell + std::log(std::min(dT, cap));
    lv.log_ell = std::min(next, 0.0);
  }
  return tr;
}

double fit_log_double_exponential(const IterationTrace& trace) {
  require(trace.levels.size() >= 6, "fit_double_exponential: trace with >= 6 levels");
  double lu = 0.0;
  for (const auto& l : trace.levels) {
    require(std::isfinite(l.log_ell), "fit_double_exponential: every ell_n > 0");
    lu = std::min(lu, std::ldexp(l.log_ell, -l.n));
  }
  require(lu < 0.0, "fit_double_exponential: u < 1");
  return lu;
}

double fit_double_exponential(const IterationTrace& trace) { return std::exp(fit_log_double_exponential(trace)); }

double double_exponential_slope(const IterationTrace& trace, int n_lo, int n_hi) {
  require(n_lo >= 0 && n_hi > n_lo && n_hi < static_cast<int>(trace.levels.size()),
          "double_exponential_slope: 0 <= n_lo < n_hi < levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = n_hi - n_lo + 1;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double le = trace.levels[n].log_ell;
    require(le < 0.0 && std::isfinite(le), "double_exponential_slope: 0 < ell_n < 1 on the range");
    const double y = std::log(-le);
    sx += n;
    sy += y;
    sxx += double(n) * n;
    sxy += n * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::uint64_t trace_digest(const IterationTrace& trace) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& l : trace.levels) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &l.log_ell, sizeof(double));
    for (unsigned char c : b) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  return h;
}

double EnvelopeCertificate::mu() const { return std::exp(log_mu); }

double EnvelopeCertificate::log_bound(const Vec3d& v) const { return log_mu - eta * (v - v_c).squaredNorm(); }

EnvelopeCertificate certificate_from_trace(const IterationTrace& trace, double r, const Vec3d& v0) {
  require(r > 0.0, "certificate_from_trace: r > 0");
  const double log_u = fit_log_double_exponential(trace);
  EnvelopeCertificate c;
  c.u = std::exp(log_u);
  c.levels = static_cast<int>(trace.levels.size()) - 1;
  c.C_R = 1.0;
  for (const auto& l : trace.levels) c.C_R = std::min(c.C_R, l.R / std::sqrt(std::ldexp(1.0, l.n)));
  const double gamma = trace.config.params.gamma;
  // a velocity with R_{n-1} < |v| <= R_n sees ell_n >= u^(2^n) and 2^n < 2 |v|^2 / C_R^2
  const double log_inv_u = -log_u;
  c.log_mu = log_u - (3.0 + gamma) * std::log(r);
  c.eta = 2.0 * log_inv_u / (c.C_R * c.C_R * r * r);
  c.v_c = v0;
  c.v_radius = r * trace.levels.back().R;
  c.t_lo = trace.config.t_offset + trace.levels.back().T;
  c.t_hi = trace.config.t_offset + trace.config.T0;
  c.x_radius = r;
  c.degenerate = !(log_inv_u > 1e-12) || !(c.eta > 0.0);
  c.trace_digest = trace_digest(trace);
  return c;
}

}  // namespace nclb
