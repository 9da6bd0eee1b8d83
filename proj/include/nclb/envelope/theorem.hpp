#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nclb/barrier/barrier.hpp"
#include "nclb/envelope/iteration.hpp"
#include "nclb/solver/solver.hpp"

namespace nclb {

struct TheoremConfig {
  /// final time
  double T = 0.5;
  /// mass core of the initial data: f0 >= delta on B_r(x0) x B_r(v0)
  double delta = 1.0;
  double r = 0.5;
  double x0 = 0.0;
  Vec3d v0 = Vec3d::UnitX();
  /// measured constant of the pointwise collision bound
  double Lambda = 0.0;
  /// time constant of the push barrier; <= 0 selects 1 / (24 Lambda)
  double C_push = 0.0;
  /// constant of the spreading recursion
  double c_spread = 1.0;
  int levels = 30;
  /// restarts take (1 - restart_margin) times the measured core minimum as delta
  double restart_margin = 0.1;
  /// absolute tolerance of every comparison with the solver field
  double noise_margin = 0.0;
  /// spatial targets x1; empty means x0 on a homogeneous grid and every node otherwise
  std::vector<double> x_targets;

  void validate() const;
  double push_constant() const;
};

struct StepLogEntry {
  int stage = 0;
  double stage_start = 0.0;
  double t = 0.0;
  double x1 = 0.0;
  int step = 0;
  std::string quantity;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
  std::string note;
};

struct CertificateRecord {
  int stage = 0;
  int step = 0;
  double t = 0.0;
  double x1 = 0.0;
  EnvelopeCertificate cert;
};

struct CertificateCheck {
  int stage = 0;
  int step = 0;
  double t = 0.0;
  double x1 = 0.0;
  int points = 0;
  int violations = 0;
  /// min over checked nodes of f - mu exp(-eta |v - v_c|^2)
  double min_gap = 0.0;
};

struct TheoremReport {
  double t_star = 0.0;
  double T_star = 0.0;
  double T0 = 0.0;
  double C_push = 0.0;
  int restarts = 0;
  std::vector<double> output_times;
  std::vector<int> stages;
  std::vector<double> stage_starts;
  std::vector<double> stage_deltas;
  std::vector<CertificateRecord> certificates;
  std::vector<CertificateCheck> checks;
  std::vector<OrderingRow> push_ordering;
  std::vector<StepLogEntry> log;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<PhaseFieldd> snapshots;

  int violations() const;
  /// output times with at least one non-degenerate certificate
  int certified_slices() const;
};

/// Minimum of f over the discrete {|x - x0| < r} x {|v - v0| < r}; 0 when the ball holds no node.
double core_minimum(const PhaseFieldd& f, double x0, const Vec3d& v0, double r);

/// Runs the solver from f0 to T and executes the five-step lower-bound
/// schedule at every output time: stages start at multiples of T0/2, stage 0
/// from the mass core of f0 and later stages from the core measured on the
/// solver field. Each target (t, x1) receives the spreading certificate near
/// the transported core (step 2) and the certificate reached through step 3 or
/// step 4; every certificate and the step-1 push barrier are checked against the field.
TheoremReport orchestrate_theorem(const PhaseFieldd& f0, const Solver& solver, const KernelParams& params,
                                  const TheoremConfig& cfg);

/// Recomputes certificates, checks, push comparisons and the step log from the
/// snapshots and stage cores already in the report (no solver work).
void certify(TheoremReport& rep, const KernelParams& params, const TheoremConfig& cfg);

void write_step_log_text(std::ostream& out, const TheoremReport& report);
/// stage,stage_start,t,x1,step,quantity,lhs,rhs,ok,note
void write_step_log_csv(std::ostream& out, const TheoremReport& report);
/// stage,step,t,x1,points,violations,min_gap
void write_checks_csv(std::ostream& out, const TheoremReport& report);
void write_certificates_json(std::ostream& out, const TheoremReport& report);

}  // namespace nclb
