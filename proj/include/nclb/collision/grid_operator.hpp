#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nclb/core/grid.hpp"
#include "nclb/core/kernel_params.hpp"

namespace nclb {

/// Resolution of the grid collision operator. Lengths given in cells are
/// multiples of the velocity spacing h.
struct GridOperatorConfig {
  /// hemisphere of jump directions (n_pol x n_az product rule)
  int n_pol = 4;
  int n_az = 8;
  /// log-spaced jump radii on [rho_min, reach]
  int n_rho = 12;
  double rho_min_cells = 1.0;
  /// largest jump and plane radius, as a multiple of the grid half-width L
  double reach_factor = 1.5;
  /// ring spacing in the plane, and arc length between ring samples, in cells
  double ring_cells = 1.0;
  double arc_cells = 1.0;
  /// cancellation constant; <= 0 selects the analytic value
  double c_cancel = 0.0;
  /// subtract the trilinear bias 1/2 xi (1 - xi) h^2 f_aa from the jump
  /// values (f_aa by node second differences), floored at zero
  bool curvature_correction = true;
  /// pick the Q_ns coefficient per evaluation so that sum_v Q = 0
  bool conserve_mass = true;

  void validate() const;
};

/// Q(f, f) on a cell-centred velocity grid, f extended by zero outside.
///
/// Q_s uses the Carleman form with jumps a = rho omega, omega on a
/// hemisphere, paired as f(v+a) + f(v-a) - 2 f(v). The plane integral is
/// a sum over rings |b| = beta_j of ring averages of the trilinear
/// interpolant; because the offsets are the same for every node, each ring
/// is a fixed stencil. Jumps below rho_min use the second difference at
/// rho_min as the curvature. Q_ns is C f(v) sum_j W(v - v_j) f_j, with W the
/// exact cell integral of |z|^gamma.
class GridCollisionOperator {
 public:
  GridCollisionOperator(const VelocityGrid<double>& grid, const KernelParams& params,
                        const GridOperatorConfig& cfg = {});

  struct ApplyInfo {
    /// coefficient used for Q_ns (the analytic one unless conserve_mass)
    double c_effective = 0.0;
    /// max over nodes of the coefficient of -f(v) in Q_s
    double max_loss_rate = 0.0;
  };

  /// q = Q(f, f); loss_rate (optional) receives the coefficient of -f(v) in Q_s.
  ApplyInfo apply(const Eigen::ArrayXd& f, Eigen::ArrayXd& q, Eigen::ArrayXd* loss_rate = nullptr) const;

  double c_cancel() const { return c_cancel_; }
  const VelocityGrid<double>& grid() const { return grid_; }
  /// taps summed over all directions and rings (cost per node)
  std::size_t stencil_size() const;

 private:
  struct Direction {
    double weight = 0.0;
    std::vector<int> ring_begin;  // n_rings + 1 entries into off/w
    std::vector<long> off;
    std::vector<double> w;
    // per jump radius: 8-tap stencils for v + a and v - a
    std::vector<std::array<long, 8>> plus_off, minus_off;
    std::vector<std::array<double, 8>> plus_w, minus_w;
    std::array<long, 8> inner_plus_off{}, inner_minus_off{};
    std::array<double, 8> inner_plus_w{}, inner_minus_w{};
    // trilinear bias coefficients xi (1 - xi) h^2 / 2 per axis, same layout
    std::vector<Vec3d> plus_bias, minus_bias;
    Vec3d inner_plus_bias = Vec3d::Zero(), inner_minus_bias = Vec3d::Zero();
  };

  void build_stencil(const Vec3d& disp, std::array<long, 8>& off, std::array<double, 8>& w,
                     Vec3d* bias = nullptr) const;
  void build_convolution_weights();

  VelocityGrid<double> grid_;
  KernelParams params_;
  GridOperatorConfig cfg_;
  double c_cancel_ = 0.0;
  int pad_ = 0;
  int np_ = 0;
  double rho_min_ = 0.0;
  std::vector<double> rho_, rho_w_;  // jump radii and weights (rho^(-1-2s) included)
  std::vector<double> ring_beta_;
  // ring_coef_[m * n_rings + j]: weight of ring j in the plane integral at rho_m; row n_rho is rho -> 0
  std::vector<double> ring_coef_;
  std::vector<Direction> dirs_;
  Eigen::ArrayXd conv_w_;  // (2n-1)^3 offsets
};

/// Integral of |y|^gamma over the cube [-1/2, 1/2]^3.
double unit_cube_riesz(double gamma);

}  // namespace nclb
