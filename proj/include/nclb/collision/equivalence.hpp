#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nclb/collision/cancellation.hpp"
#include "nclb/collision/carleman.hpp"
#include "nclb/collision/sigma.hpp"

namespace nclb {

struct EquivalenceCase {
  VelocityFunction f;
  VelocityFunction g;
  std::vector<Vec3d> points;
  std::string label;
};

struct EquivalenceRow {
  std::string label;
  Vec3d v = Vec3d::Zero();
  double sigma = 0.0;
  double carleman_s = 0.0;
  double nonsingular = 0.0;
  /// |sigma - (carleman_s + nonsingular)| / (1 + |sigma|)
  double residual = 0.0;
  double seconds = 0.0;
  bool converged = true;
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  double max_residual = 0.0;
  double max_seconds = 0.0;
  double total_seconds = 0.0;
  bool all_converged = true;
};

/// Evaluates both representations at every point of every case. Non-converged
/// extrapolations are recorded rather than thrown.
EquivalenceReport run_equivalence(const std::vector<EquivalenceCase>& battery, const KernelParams& params,
                                  const SigmaQuadrature& sq, const CarlemanQuadrature& cq,
                                  const ConvolutionQuadrature& vq = {});

/// Five pairs of smooth compactly supported f (polynomial bumps) and smooth g,
/// each with n_points sample points drawn uniformly from the ball of radius 1.5.
std::vector<EquivalenceCase> default_equivalence_battery(int n_points = 20, std::uint64_t seed = 7);

/// Cases with f = 0, where every term vanishes.
std::vector<EquivalenceCase> trivial_equivalence_battery();

/// label,vx,vy,vz,value_sigma,value_carleman,value_ns,residual,converged (timings are left out so reruns compare byte for byte)
void write_equivalence_csv(std::ostream& out, const EquivalenceReport& report);

}  // namespace nclb
