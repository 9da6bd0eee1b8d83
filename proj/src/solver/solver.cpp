#include "nclb/solver/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nclb/core/diagnostics.hpp"
#include "nclb/core/errors.hpp"

namespace nclb {

void SolverConfig::validate(const PhaseFieldd& f) const {
  require(dt > 0.0, "SolverConfig: dt > 0");
  require(t_end >= 0.0, "SolverConfig: t_end >= 0");
  require(cfl > 0.0 && cfl <= 1.0, "SolverConfig: 0 < cfl <= 1");
  require(clip_abort > 0.0, "SolverConfig: clip_abort > 0");
  require(snapshot_every >= 1, "SolverConfig: snapshot_every >= 1");
  require(min_substeps >= 1 && min_substeps <= max_substeps, "SolverConfig: 1 <= min_substeps <= max_substeps");
  collision.validate();
  if (!f.x_grid().is_homogeneous()) {
    const double vmax = f.v_grid().extent() - 0.5 * f.v_grid().spacing();
    require(dt * vmax / f.x_grid().spacing() <= 1.0 + 1e-12, "SolverConfig: dt * max|v| / h_x <= 1");
  }
}

Solver::Solver(const KernelParams& params, const VelocityGrid<double>& v_grid, SolverConfig cfg)
    : params_(params), cfg_(std::move(cfg)),
      op_(std::make_shared<GridCollisionOperator>(v_grid, params, cfg_.collision)) {}

CollisionReport Solver::step_collision(PhaseFieldd& f, double dt) const {
  require(f.v_grid() == op_->grid(), "step_collision: field on the operator's velocity grid");
  CollisionReport rep;
  const double cell = f.v_grid().cell_volume();
  const double total = f.values().sum() * cell;
  Eigen::ArrayXd q, q2;
  for (int ix = 0; ix < f.n_x(); ++ix) {
    Eigen::ArrayXd g = f.block(ix);
    double t = 0.0;
    while (t < dt * (1.0 - 1e-12)) {
      if (g.maxCoeff() <= 0.0) break;
      const auto info = op_->apply(g, q);
      rep.c_effective = info.c_effective;
      double h = std::min(dt - t, cfg_.dt / cfg_.min_substeps);
      if (info.max_loss_rate > 0.0) h = std::min(h, cfg_.cfl / info.max_loss_rate);
      if (cfg_.integrator == Integrator::euler) {
        g += h * q;
      } else {
        Eigen::ArrayXd mid = (g + 0.5 * h * q).max(0.0);
        op_->apply(mid, q2);
        g += h * q2;
      }
      const double floor = -cfg_.epsilon_pos * g.maxCoeff();
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (g[i] >= 0.0) continue;
        if (g[i] < floor) rep.clipped_mass += -g[i] * cell;
        g[i] = 0.0;
      }
      t += h;
      if (++rep.substeps > cfg_.max_substeps) throw MonitorError("step_collision: sub-step limit exceeded");
    }
    f.block(ix) = g;
  }
  if (total > 0.0 && rep.clipped_mass > cfg_.clip_abort * total) {
    std::ostringstream msg;
    msg << "step_collision: clipped mass " << rep.clipped_mass << " exceeds " << cfg_.clip_abort << " of total " << total;
    throw MonitorError(msg.str());
  }
  f.set_time(f.time() + dt);
  return rep;
}

void step_transport(PhaseFieldd& f, double dt) {
  if (f.x_grid().is_homogeneous() || dt == 0.0) return;
  const int nx = f.n_x();
  const double hx = f.x_grid().spacing();
  const auto& vg = f.v_grid();
  const PhaseFieldd old = f;
  for (std::size_t iv = 0; iv < f.block_size(); ++iv) {
    double shift = vg.node(iv)[0] * dt / hx;
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) < 1e-12) shift = rounded;
    const double fl = std::floor(shift);
    const double a = shift - fl;
    const long k = static_cast<long>(fl);
    for (int j = 0; j < nx; ++j) {
      // value at x_j - shift h_x
      const int j0 = static_cast<int>(((j - k) % nx + nx) % nx);
      const int j1 = (j0 - 1 + nx) % nx;
      f(j, iv) = a == 0.0 ? old(j0, iv) : (1.0 - a) * old(j0, iv) + a * old(j1, iv);
    }
  }
}

DiagnosticsRow diagnose(const PhaseFieldd& f, const KernelParams& params, double core_radius) {
  DiagnosticsRow row;
  row.t = f.time();
  const auto mom = moment_weighted(f, params);
  for (const auto& m : mom.per_x) {
    row.mass += m.mass;
    row.energy += m.energy;
  }
  row.K0_monitor = mom.sup.weighted;
  row.min_f = f.values().minCoeff();
  row.min_core = std::numeric_limits<double>::infinity();
  const auto& vg = f.v_grid();
  for (std::size_t iv = 0; iv < f.block_size(); ++iv) {
    if (vg.node(iv).norm() > core_radius) continue;
    for (int ix = 0; ix < f.n_x(); ++ix) row.min_core = std::min(row.min_core, f(ix, iv));
  }
  if (!std::isfinite(row.min_core)) row.min_core = 0.0;
  return row;
}

CollisionReport Solver::step(PhaseFieldd& f, double h) const {
  const double t_next = f.time() + h;
  CollisionReport cr;
  if (cfg_.splitting == Splitting::strang) {
    step_transport(f, 0.5 * h);
    cr = step_collision(f, h);
    step_transport(f, 0.5 * h);
  } else {
    step_transport(f, h);
    cr = step_collision(f, h);
  }
  f.set_time(t_next);
  return cr;
}

std::vector<DiagnosticsRow> Solver::advance(PhaseFieldd& f, double t_to,
                                            const std::function<void(const DiagnosticsRow&)>& on_step) const {
  require(t_to >= f.time(), "advance: target time not before the field time");
  std::vector<DiagnosticsRow> rows;
  const double t_from = f.time();
  const int n_steps = static_cast<int>(std::ceil((t_to - t_from) / cfg_.dt - 1e-9));
  for (int step = 1; step <= n_steps; ++step) {
    const double t_next = step == n_steps ? t_to : t_from + step * cfg_.dt;
    const CollisionReport cr = this->step(f, t_next - f.time());
    f.set_time(t_next);
    DiagnosticsRow row = diagnose(f, params_, cfg_.core_radius);
    row.clipped_mass = cr.clipped_mass;
    row.substeps = cr.substeps;
    rows.push_back(row);
    if (on_step) on_step(row);
    if (row.K0_monitor > cfg_.K0_bound) {
      std::ostringstream msg;
      msg << "advance: weighted moment " << row.K0_monitor << " exceeds K0 = " << cfg_.K0_bound << " at t = " << row.t;
      throw MonitorError(msg.str());
    }
  }
  return rows;
}

Trajectory Solver::run(const PhaseFieldd& f0, const std::function<void(const DiagnosticsRow&)>& on_step) const {
  cfg_.validate(f0);
  Trajectory tr;
  PhaseFieldd f = f0;
  tr.snapshots.push_back(f);
  tr.diagnostics.push_back(diagnose(f, params_, cfg_.core_radius));
  if (on_step) on_step(tr.diagnostics.back());

  const int n_steps = static_cast<int>(std::ceil(cfg_.t_end / cfg_.dt - 1e-9));
  const double t0 = f0.time();
  for (int step = 1; step <= n_steps; ++step) {
    const double t_next = std::min(t0 + step * cfg_.dt, t0 + cfg_.t_end);
    const auto rows = advance(f, t_next, on_step);
    for (const auto& row : rows) {
      tr.clipped_total += row.clipped_mass;
      tr.diagnostics.push_back(row);
    }
    if (step % cfg_.snapshot_every == 0 || step == n_steps) tr.snapshots.push_back(f);
  }
  return tr;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
  out << "t,mass,energy,min_f,K0_monitor,clipped_mass,min_core,substeps\n";
  out << std::setprecision(10);
  for (const auto& r : rows)
    out << r.t << ',' << r.mass << ',' << r.energy << ',' << r.min_f << ',' << r.K0_monitor << ',' << r.clipped_mass
        << ',' << r.min_core << ',' << r.substeps << '\n';
}

}  // namespace nclb
