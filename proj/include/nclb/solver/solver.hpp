#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

#include "nclb/collision/grid_operator.hpp"
#include "nclb/core/kernel_params.hpp"
#include "nclb/core/phase_field.hpp"

namespace nclb {

enum class Splitting { lie, strang };
enum class Integrator { euler, midpoint };

struct SolverConfig {
  double dt = 0.05;
  double t_end = 0.5;
  Splitting splitting = Splitting::lie;
  Integrator integrator = Integrator::euler;
  GridOperatorConfig collision;
  /// negative values above -epsilon_pos * max f are zeroed without counting as clipped
  double epsilon_pos = 1e-14;
  /// collision sub-steps satisfy dt_sub * max loss rate <= cfl
  double cfl = 0.9;
  int max_substeps = 100000;
  /// lower bound on collision sub-steps per interval of length dt; each evaluation of Q widens
  /// the support of f by at most a factor sqrt(2) about its centre, so filling
  /// a vacuum region within one step needs several of them
  int min_substeps = 1;
  /// abort when the mass clipped in one step exceeds this fraction of the total
  double clip_abort = 1e-3;
  /// abort when the weighted moment sup_x int (1+|v|^k) f exceeds this bound
  double K0_bound = std::numeric_limits<double>::infinity();
  /// keep every n-th step as a snapshot (the initial and final fields are always kept)
  int snapshot_every = 1;
  /// min f over |v| <= core_radius is reported each step
  double core_radius = 2.0;

  void validate(const PhaseFieldd& f) const;
};

struct CollisionReport {
  int substeps = 0;
  double clipped_mass = 0.0;
  double c_effective = 0.0;
};

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double min_f = 0.0;
  double K0_monitor = 0.0;
  double clipped_mass = 0.0;
  double min_core = 0.0;
  int substeps = 0;
};

struct Trajectory {
  std::vector<PhaseFieldd> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
  double clipped_total = 0.0;
};

/// Holds one collision operator per velocity grid and advances fields.
class Solver {
 public:
  Solver(const KernelParams& params, const VelocityGrid<double>& v_grid, SolverConfig cfg);

  const SolverConfig& config() const { return cfg_; }
  const GridCollisionOperator& collision_operator() const { return *op_; }

  /// df/dt = Q(f, f) over dt at every spatial point, with sub-stepping,
  /// clipping of negative values and the clipped-mass abort.
  CollisionReport step_collision(PhaseFieldd& f, double dt) const;

  /// One splitting step of length h.
  CollisionReport step(PhaseFieldd& f, double h) const;

  /// Steps of length <= dt from f.time() to t_to (the last one shorter), one diagnostics row each.
  std::vector<DiagnosticsRow> advance(PhaseFieldd& f, double t_to,
                                      const std::function<void(const DiagnosticsRow&)>& on_step = nullptr) const;

  /// Splitting driver from f0 to cfg.t_end.
  Trajectory run(const PhaseFieldd& f0,
                 const std::function<void(const DiagnosticsRow&)>& on_step = nullptr) const;

 private:
  KernelParams params_;
  SolverConfig cfg_;
  std::shared_ptr<GridCollisionOperator> op_;
};

/// Semi-Lagrangian x <- x - v_x dt on the periodic x grid, linear interpolation.
void step_transport(PhaseFieldd& f, double dt);

DiagnosticsRow diagnose(const PhaseFieldd& f, const KernelParams& params, double core_radius);

/// t,mass,energy,min_f,K0_monitor,clipped_mass,min_core,substeps
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows);

}  // namespace nclb
