#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "nclb/core/errors.hpp"

namespace nclb {

/// Exponents and angular factor of the collision kernel
///   B(v - v*, sigma) = |v - v*|^gamma theta^(-2-2s) b_tilde(cos theta).
struct KernelParams {
  double gamma = 0.0;
  double s = 0.5;
  std::function<double(double)> b_tilde = [](double) { return 1.0; };
  double b_min = 1.0;
  double b_max = 1.0;

  double gamma_2s() const { return gamma + 2.0 * s; }
  double gamma_2s_plus() const { return std::max(0.0, gamma + 2.0 * s); }
  /// q = 5 + 2(gamma + 2s), the exponent of the spreading lemma.
  double spread_exponent() const { return 5.0 + 2.0 * gamma_2s(); }

  void validate() const {
    require(gamma > -3.0 && gamma < 1.0, "KernelParams: -3 < gamma < 1");
    require(s > 0.0 && s < 1.0, "KernelParams: 0 < s < 1");
    require(b_min > 0.0 && b_min <= b_max, "KernelParams: 0 < b_min <= b_max");
    require(static_cast<bool>(b_tilde), "KernelParams: b_tilde must be set");
    for (int i = 0; i <= 1000; ++i) {
      const double u = -1.0 + 2.0 * i / 1000.0;
      const double b = b_tilde(u);
      require(b >= b_min && b <= b_max, "KernelParams: b_min <= b_tilde(u) <= b_max on [-1,1]");
    }
  }
};

inline KernelParams make_kernel(double gamma, double s) {
  KernelParams p;
  p.gamma = gamma;
  p.s = s;
  p.validate();
  return p;
}

/// <a> = sqrt(1 + a^2)
inline double japanese(double a) { return std::sqrt(1.0 + a * a); }

}  // namespace nclb
