#pragma once

#include <cstdint>
#include <vector>

#include "nclb/collision/carleman.hpp"

namespace nclb {

/// Directions omega whose plane through v (normal omega) meets B_{r/2}(v0):
/// the band |omega . axis| < half_width about the great circle perpendicular
/// to axis = (v0 - v)/|v0 - v|, or the whole sphere when |v - v0| <= r/2.
struct Cone {
  Vec3d v = Vec3d::Zero();
  Vec3d axis = Vec3d::UnitZ();
  double half_width = 1.0;
  bool full_sphere = true;
  double measure = 0.0;
  double analytic_measure = 0.0;

  bool contains(const Vec3d& omega) const { return full_sphere || std::abs(omega.dot(axis)) < half_width; }
};

/// Measure by a fixed-frame product rule (polar axis e_z, not aligned with the band).
Cone make_cone(const Vec3d& v, const Vec3d& v0, double r, int n_pol = 256, int n_az = 512);

struct ConeSample {
  Vec3d v = Vec3d::Zero();
  Vec3d v_prime = Vec3d::Zero();
  double kernel = 0.0;
  /// (1+|v|)^(1+gamma+2s) |v'-v|^(-3-2s)
  double weight = 0.0;
};

struct ConeOptions {
  int n_pol = 256;
  int n_az = 512;
  PlaneQuadrature plane{48, 48, 12.0, 1e-8};
  int n_calibration = 40;
  int n_validation = 120;
  /// lambda = safety * min over the calibration samples of kernel / weight
  double safety = 0.5;
  std::uint64_t seed = 7;
};

struct ConeReport {
  std::vector<Cone> cones;
  double mu = 0.0;      // min |A(v)| (1+|v|)
  double lambda = 0.0;  // fitted on calibration samples
  std::vector<ConeSample> calibration;
  std::vector<ConeSample> validation;
  int violations = 0;
};

/// Random on-cone pair (v, v') with v' = v - t omega, omega in A(v) and
/// t in [0.01, min(1, |v-v0| - r)], so the plane part of the kernel sees the
/// whole section of B_r(v0).
ConeSample sample_on_cone(const Cone& cone, const Vec3d& v0, double r, const VelocityFunction& minorant,
                          const KernelParams& params, const PlaneQuadrature& pq, std::uint64_t& state);

/// Lower bounds for the kernel of f >= delta 1_{B_r(v0)} at the given v:
/// cone measures, mu, and a single lambda fitted on calibration samples and
/// then checked on fresh validation samples.
ConeReport cone_of_nondegeneracy(const std::vector<Vec3d>& vs, const Vec3d& v0, double r, double delta,
                                 const KernelParams& params, const ConeOptions& opt = {});

}  // namespace nclb
