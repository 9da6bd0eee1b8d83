#pragma once

#include <string>
#include <vector>

#include "nclb/collision/cancellation.hpp"
#include "nclb/collision/carleman.hpp"
#include "nclb/core/registry.hpp"

namespace nclb {

struct LambdaPair {
  VelocityFunction f;
  VelocityFunction g;
  std::vector<Vec3d> points;
  std::string label;
};

/// sup |g| and sup of the spectral norm of D^2 g, sampled on an n^3 lattice
/// over the cube of half-width `half` about `centre` (central differences, step h).
struct GNorms {
  double sup = 0.0;
  double hessian = 0.0;
};
GNorms sample_norms(const VelocityFunction& g, const Vec3d& centre, double half, int n = 25, double h = 1e-3);

struct LambdaRow {
  std::string label;
  Vec3d v = Vec3d::Zero();
  double q_s = 0.0;
  double convolution = 0.0;  // int |w|^(gamma+2s) f(v-w) dw
  double ratio_convolution = 0.0;
  double ratio_hydro = 0.0;  // against <v>^((gamma+2s)_+) K0
};

struct LambdaReport {
  double lambda_convolution = 0.0;
  double lambda_hydro = 0.0;
  std::vector<LambdaRow> rows;
};

/// Largest observed |Q_s(f,g)(v)| / (rhs * |g|^(1-s) |D^2 g|^s) over the battery,
/// with rhs either the (gamma+2s)-convolution of f or <v>^((gamma+2s)_+) K0(f).
/// K0(f) = int (1 + |v|^max(2, gamma+2s)) f.
LambdaReport measure_lambda(const std::vector<LambdaPair>& battery, const KernelParams& params,
                            const CarlemanQuadrature& cq, const ConvolutionQuadrature& vq = {});

/// Stores Lambda (convolution form) in the registry as a measured constant.
void store_lambda(ConstantsRegistry& reg, const LambdaReport& report);

/// Ten (f, g) pairs with four sample points each: bumps and Gaussians for f,
/// Gaussians, bumps and a product for g.
std::vector<LambdaPair> default_lambda_battery();

}  // namespace nclb
