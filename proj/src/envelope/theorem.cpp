#include "nclb/envelope/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nclb/core/errors.hpp"

namespace nclb {

void TheoremConfig::validate() const {
  require(T > 0.0, "TheoremConfig: T > 0");
  require(delta > 0.0 && r > 0.0, "TheoremConfig: delta > 0 and r > 0");
  require(Lambda > 0.0, "TheoremConfig: Lambda > 0");
  require(c_spread > 0.0, "TheoremConfig: c_spread > 0");
  require(levels >= 6 && levels <= 60, "TheoremConfig: 6 <= levels <= 60");
  require(restart_margin >= 0.0 && restart_margin < 1.0, "TheoremConfig: 0 <= restart_margin < 1");
  require(noise_margin >= 0.0, "TheoremConfig: noise_margin >= 0");
}

double TheoremConfig::push_constant() const { return C_push > 0.0 ? C_push : 1.0 / (24.0 * Lambda); }

int TheoremReport::violations() const {
  int n = 0;
  for (const auto& c : checks) n += c.violations;
  for (const auto& o : push_ordering) n += o.violations;
  return n;
}

int TheoremReport::certified_slices() const {
  std::set<double> ts;
  for (const auto& c : certificates)
    if (!c.cert.degenerate) ts.insert(c.t);
  return static_cast<int>(ts.size());
}

double core_minimum(const PhaseFieldd& f, double x0, const Vec3d& v0, double r) {
  const auto& xg = f.x_grid();
  double m = std::numeric_limits<double>::infinity();
  for (int ix = 0; ix < f.n_x(); ++ix) {
    if (!xg.is_homogeneous() && std::abs(xg.separation(xg.coord(ix), x0)) >= r) continue;
    for (std::size_t iv = 0; iv < f.block_size(); ++iv)
      if ((f.v_grid().node(iv) - v0).norm() < r) m = std::min(m, f(ix, iv));
  }
  return std::isfinite(m) ? m : 0.0;
}

namespace {

double wrap(const SpaceGrid<double>& xg, double x) {
  if (xg.is_homogeneous()) return x;
  double y = std::fmod(x, xg.length());
  return y < 0.0 ? y + xg.length() : y;
}

int nearest_node(const SpaceGrid<double>& xg, double x) {
  if (xg.is_homogeneous()) return 0;
  int best = 0;
  for (int ix = 1; ix < xg.n(); ++ix)
    if (std::abs(xg.separation(xg.coord(ix), x)) < std::abs(xg.separation(xg.coord(best), x))) best = ix;
  return best;
}

struct Stage {
  int k = 0;
  double s = 0.0;
  double delta = 0.0;
  double x0 = 0.0;
  double t_star = 0.0;
};

/// Everything one target (t, x1) contributes; merged in target order.
struct TargetOutput {
  std::vector<StepLogEntry> log;
  std::vector<CertificateRecord> certs;
};

class Schedule {
 public:
  Schedule(const KernelParams& params, const TheoremConfig& cfg, const SpaceGrid<double>& xg)
      : p_(params), cfg_(cfg), xg_(xg), C_(cfg.push_constant()) {}

  double C() const { return C_; }

  double t_star(double remaining) const {
    return std::min({0.5,
                     C_ * std::pow(cfg_.r, 2.0 * p_.s) /
                         std::pow(japanese(cfg_.v0.norm() + cfg_.r), p_.gamma_2s_plus()),
                     remaining});
  }

  double T_star() const {
    const double q = cfg_.r / 64.0;
    return C_ * std::pow(q, 2.0 * p_.s) * std::pow(japanese(q), -p_.gamma_2s_plus());
  }

  /// time bound of the push lemma for a core of radius r at velocity v with scale tau
  double push_bound(double r, const Vec3d& v, double tau) const {
    const auto spec = PushBarrierSpec::from_mass_core(1.0, r, tau, Vec3d::Zero(), v, p_, cfg_.Lambda);
    return push_admissible_region(spec, p_, C_).time_bound;
  }

  /// Gaussian certificate from a lower bound exp(log_ell) on a core of radius hyp
  /// held for a window of length window starting at offset.
  EnvelopeCertificate spread(double log_ell, double hyp, double window, double offset, const Vec3d& vc,
                             const std::string& tag) const {
    const double rr = 0.5 * hyp;
    IterationConfig ic;
    ic.params = p_;
    ic.c_spread = cfg_.c_spread;
    ic.levels = cfg_.levels;
    ic.T0 = window;
    ic.t_offset = offset;
    ic.log_ell0 = std::min(0.0, log_ell + (3.0 + p_.gamma) * std::log(rr));
    const IterationTrace tr = run_iteration(ic);
    EnvelopeCertificate c = certificate_from_trace(tr, rr, vc);
    std::ostringstream os;
    os << std::setprecision(10) << tag << ": log ell = " << log_ell << ", core radius = " << hyp
       << ", window = [" << offset << ", " << offset + window << "]";
    c.provenance = os.str();
    return c;
  }

  double sep(double a, double b) const { return xg_.is_homogeneous() ? 0.0 : xg_.separation(a, b); }

  TargetOutput target(const Stage& st, double t, double x1) const {
    TargetOutput out;
    const double tau = t - st.s;
    const double g2p = p_.gamma_2s_plus();
    const double two_s = 2.0 * p_.s;
    auto log = [&](int step, const std::string& q, double lhs, double rhs, bool ok, const std::string& note = "") {
      out.log.push_back({st.k, st.s, t, x1, step, q, lhs, rhs, ok, note});
    };
    const double log_half = std::log(0.5);
    const double log_delta = std::log(st.delta);
    const double v0n = cfg_.v0.norm();

    // Step 2: spreading from the step-1 core of radius r/4
    const double xc2 = wrap(xg_, st.x0 + tau * cfg_.v0[0]);
    if (xg_.is_homogeneous() || std::abs(sep(x1, xc2)) < cfg_.r / 8.0) {
      auto c = spread(log_delta + log_half, cfg_.r / 4.0, tau, st.s, cfg_.v0, "step 2");
      c.x_c = xc2;
      c.x_radius = cfg_.r / 8.0;
      out.certs.push_back({st.k, 2, t, x1, c});
      log(2, "certificate_eta", c.eta, 0.0, !c.degenerate, "log mu = " + std::to_string(c.log_mu));
    }

    // Step 3: transport of a step-2 bound to x1
    const double r0 = cfg_.r / 16.0;
    const double t_cap = v0n > 0.0 ? std::min(st.t_star, cfg_.r / (16.0 * v0n)) : st.t_star;
    log(3, "t1_cap", tau, t_cap, tau <= t_cap * (1.0 + 1e-12));

    struct Reach {
      bool ok = false;
      EnvelopeCertificate cert;
      Vec3d v1 = Vec3d::Zero();
    };
    auto step3 = [&](double t1, bool record) {
      Reach res;
      const double d = sep(x1, st.x0);
      res.v1 = Vec3d(2.0 * d / t1, 0.0, 0.0);
      const double lhs = std::pow(t1, 1.0 + two_s) * std::pow(japanese((std::abs(d) + r0) / t1), g2p);
      const double rhs = C_ * std::pow(r0, two_s);
      const double bound = push_bound(r0, res.v1, 0.5 * t1);
      const bool ok = lhs < rhs && bound >= 0.5 * t1;
      if (record) {
        log(3, "t1_condition", lhs, rhs, lhs < rhs);
        log(3, "push_time_bound", 0.5 * t1, bound, bound >= 0.5 * t1);
      }
      if (!ok) return res;
      const auto c2 = spread(log_delta + log_half, cfg_.r / 4.0, 0.5 * t1, st.s, cfg_.v0, "step 2 at t1/2");
      const double reach = (res.v1 - cfg_.v0).norm() + 2.0 * r0 / t1;
      const double log_delta0 = c2.log_mu - c2.eta * reach * reach;
      if (record) log(3, "log_delta0", log_delta0, 0.0, std::isfinite(log_delta0));
      res.cert = spread(log_delta0 + log_half, r0 / 4.0, 0.5 * t1, st.s + 0.5 * t1, res.v1, "step 3");
      res.cert.x_c = wrap(xg_, x1);
      res.cert.x_radius = r0 / 8.0;
      res.ok = true;
      return res;
    };

    const Reach direct = step3(tau, true);
    if (direct.ok) {
      out.certs.push_back({st.k, 3, t, x1, direct.cert});
      return out;
    }

    // Step 4: reach x1 at an earlier time, then hold the bound near v = 0
    double t_early = tau;
    Reach early;
    for (int m = 1; m <= 60 && !early.ok; ++m) {
      t_early = std::ldexp(tau, -m);
      early = step3(t_early, false);
    }
    log(4, "t1_tilde", t_early, tau, early.ok, early.ok ? "" : "no admissible earlier time");
    if (!early.ok) return out;
    const double r4 = r0 / 8.0;
    const double reach = early.v1.norm() + r4;
    const double log_delta1 = early.cert.log_mu - early.cert.eta * reach * reach;
    const double hold = push_bound(r4, Vec3d::Zero(), 1.0);
    log(4, "hold_time", tau - t_early, hold, tau - t_early <= hold, "T_star = " + std::to_string(T_star()));
    if (tau - t_early > hold) return out;
    auto c = spread(log_delta1 + log_half, r4 / 4.0, tau - t_early, st.s + t_early, Vec3d::Zero(), "step 4");
    c.x_c = wrap(xg_, x1);
    c.x_radius = r4 / 8.0;
    out.certs.push_back({st.k, 4, t, x1, c});
    return out;
  }

 private:
  KernelParams p_;
  TheoremConfig cfg_;
  SpaceGrid<double> xg_;
  double C_;
};

CertificateCheck check_certificate(const PhaseFieldd& f, const CertificateRecord& rec, double noise) {
  CertificateCheck chk{rec.stage, rec.step, rec.t, rec.x1, 0, 0, std::numeric_limits<double>::infinity()};
  const int ix = nearest_node(f.x_grid(), rec.x1);
  for (std::size_t iv = 0; iv < f.block_size(); ++iv) {
    const Vec3d v = f.v_grid().node(iv);
    if ((v - rec.cert.v_c).norm() > rec.cert.v_radius) continue;
    ++chk.points;
    const double gap = f(ix, iv) - std::exp(rec.cert.log_bound(v));
    chk.min_gap = std::min(chk.min_gap, gap);
    if (gap < -noise) ++chk.violations;
  }
  return chk;
}

}  // namespace

TheoremReport orchestrate_theorem(const PhaseFieldd& f0, const Solver& solver, const KernelParams& params,
                                  const TheoremConfig& cfg) {
  cfg.validate();
  params.validate();
  solver.config().validate(f0);
  const auto& xg = f0.x_grid();
  {
    const double m = core_minimum(f0, cfg.x0, cfg.v0, cfg.r);
    if (!(m >= cfg.delta)) {
      std::ostringstream msg;
      msg << "no mass core: min f0 over B_r(x0) x B_r(v0) is " << m << " < delta = " << cfg.delta;
      throw ConfigError(msg.str());
    }
  }

  Schedule sched(params, cfg, xg);
  TheoremReport rep;
  rep.t_star = sched.t_star(cfg.T);
  rep.T_star = sched.T_star();
  const double v0n = cfg.v0.norm();
  rep.T0 = std::min({rep.t_star, v0n > 0.0 ? cfg.r / (16.0 * v0n) : rep.t_star, rep.T_star, cfg.T});

  const double dt = solver.config().dt;
  const int n_out = static_cast<int>(std::ceil(cfg.T / dt - 1e-9));
  PhaseFieldd f = f0;
  std::map<int, PhaseFieldd> stage_fields;
  std::set<int> restarted;
  const double half = 0.5 * rep.T0;

  for (int j = 1; j <= n_out; ++j) {
    const double t = std::min(j * dt, cfg.T);
    int k = std::max(0, static_cast<int>(std::ceil((t - rep.T0) / half - 1e-9)));
    const double s = k * half;
    double delta = cfg.delta;
    if (k > 0) {
      if (!stage_fields.count(k)) {
        if (s < f.time() - 1e-12 * std::max(1.0, s))
          throw ConfigError("orchestrate_theorem: output spacing shorter than the restart cadence T0/2");
        const auto rows = solver.advance(f, s);
        rep.diagnostics.insert(rep.diagnostics.end(), rows.begin(), rows.end());
        stage_fields.emplace(k, f);
      }
      delta = (1.0 - cfg.restart_margin) *
              core_minimum(stage_fields.at(k), wrap(xg, cfg.x0 + s * cfg.v0[0]), cfg.v0, cfg.r);
      restarted.insert(k);
    }
    const auto rows = solver.advance(f, t);
    rep.diagnostics.insert(rep.diagnostics.end(), rows.begin(), rows.end());
    rep.output_times.push_back(t);
    rep.stages.push_back(k);
    rep.stage_starts.push_back(s);
    rep.stage_deltas.push_back(delta);
    rep.snapshots.push_back(f);
  }
  rep.restarts = static_cast<int>(restarted.size());
  certify(rep, params, cfg);
  return rep;
}

void certify(TheoremReport& rep, const KernelParams& params, const TheoremConfig& cfg) {
  cfg.validate();
  require(!rep.snapshots.empty(), "certify: report holds solver snapshots");
  const auto& xg = rep.snapshots.front().x_grid();
  Schedule sched(params, cfg, xg);
  rep.C_push = sched.C();
  rep.certificates.clear();
  rep.checks.clear();
  rep.push_ordering.clear();
  rep.log.clear();
  std::vector<double> targets = cfg.x_targets;
  if (targets.empty()) {
    if (xg.is_homogeneous())
      targets.push_back(cfg.x0);
    else
      for (int ix = 0; ix < xg.n(); ++ix) targets.push_back(xg.coord(ix));
  }
  for (std::size_t j = 0; j < rep.output_times.size(); ++j) {
    const PhaseFieldd& f = rep.snapshots[j];
    const double t = rep.output_times[j];
    const int k = rep.stages[j];
    Stage st;
    st.k = k;
    st.s = rep.stage_starts[j];
    st.delta = rep.stage_deltas[j];
    st.x0 = wrap(xg, cfg.x0 + st.s * cfg.v0[0]);
    st.t_star = sched.t_star(cfg.T - st.s);

    const double tau = t - st.s;
    rep.log.push_back({k, st.s, t, st.x0, 5, "restart_delta", st.delta, 0.0, st.delta > 0.0,
                       k == 0 ? "initial mass core" : "core measured on the solver field"});
    rep.log.push_back({k, st.s, t, st.x0, 1, "t_star", tau, st.t_star, tau <= st.t_star * (1.0 + 1e-12), ""});
    if (!(st.delta > 0.0)) continue;

    // Step 1: the push barrier from the stage core, compared with the field
    const auto push = PushBarrierSpec::from_mass_core(st.delta, cfg.r, 1.0, Vec3d(st.x0, 0, 0), cfg.v0, params,
                                                      cfg.Lambda);
    const auto region = push_admissible_region(push, params, rep.C_push);
    rep.log.push_back({k, st.s, t, st.x0, 1, "push_time_bound", tau, region.time_bound, tau < region.time_bound, ""});
    const bool homogeneous = xg.is_homogeneous();
    const double s = st.s;
    const Vec3d x0v(st.x0, 0, 0);
    auto embed = [&, s](double tt, const Vec3d& x) {
      const double tl = tt - s;
      if (homogeneous) return Vec3d(x0v + tl * cfg.v0);
      return Vec3d(x[0], tl * cfg.v0[1], tl * cfg.v0[2]);
    };
    const auto rows_push = barrier_ordering_check(
        {f}, [&](double tt, const Vec3d& x, const Vec3d& v) { return push_barrier_eval(push, tt - s, embed(tt, x), v); },
        [&](double tt, const Vec3d&, const Vec3d&) { return tt - s < region.time_bound; }, cfg.noise_margin,
        wrap(xg, st.x0 + tau * cfg.v0[0]));
    rep.push_ordering.insert(rep.push_ordering.end(), rows_push.begin(), rows_push.end());

    // Steps 2-4 per target, in parallel; merged in target order
    std::vector<TargetOutput> outs(targets.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(targets.size()); ++i) outs[i] = sched.target(st, t, targets[i]);
    for (auto& o : outs) {
      rep.log.insert(rep.log.end(), o.log.begin(), o.log.end());
      for (auto& c : o.certs) {
        rep.checks.push_back(check_certificate(f, c, cfg.noise_margin));
        rep.certificates.push_back(std::move(c));
      }
    }
  }
}


void write_step_log_text(std::ostream& out, const TheoremReport& rep) {
  out << std::setprecision(8);
  out << "C_push = " << rep.C_push << ", t_star = " << rep.t_star << ", T_star = " << rep.T_star
      << ", T0 = " << rep.T0 << ", restarts = " << rep.restarts << "\n";
  for (const auto& e : rep.log) {
    out << "[stage " << e.stage << " @ " << e.stage_start << "] t = " << e.t << " x1 = " << e.x1 << " step " << e.step
        << ": " << e.quantity << " " << e.lhs << (e.ok ? " ok " : " FAILED ") << "vs " << e.rhs;
    if (!e.note.empty()) out << " (" << e.note << ")";
    out << "\n";
  }
  out << "certificates: " << rep.certificates.size() << ", violations: " << rep.violations() << "\n";
}

void write_step_log_csv(std::ostream& out, const TheoremReport& rep) {
  out << "stage,stage_start,t,x1,step,quantity,lhs,rhs,ok,note\n" << std::setprecision(12);
  for (const auto& e : rep.log)
    out << e.stage << ',' << e.stage_start << ',' << e.t << ',' << e.x1 << ',' << e.step << ',' << e.quantity << ','
        << e.lhs << ',' << e.rhs << ',' << (e.ok ? 1 : 0) << ",\"" << e.note << "\"\n";
}

void write_checks_csv(std::ostream& out, const TheoremReport& rep) {
  out << "stage,step,t,x1,points,violations,min_gap\n" << std::setprecision(12);
  for (const auto& c : rep.checks)
    out << c.stage << ',' << c.step << ',' << c.t << ',' << c.x1 << ',' << c.points << ',' << c.violations << ','
        << c.min_gap << '\n';
}

void write_certificates_json(std::ostream& out, const TheoremReport& rep) {
  nlohmann::json j;
  j["C_push"] = rep.C_push;
  j["t_star"] = rep.t_star;
  j["T_star"] = rep.T_star;
  j["T0"] = rep.T0;
  j["restarts"] = rep.restarts;
  j["violations"] = rep.violations();
  j["certified_slices"] = rep.certified_slices();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rep.certificates) {
    const auto& c = r.cert;
    std::ostringstream digest;
    digest << std::hex << std::setw(16) << std::setfill('0') << c.trace_digest;
    arr.push_back({{"stage", r.stage},
                   {"step", r.step},
                   {"t", r.t},
                   {"x", r.x1},
                   {"log_mu", c.log_mu},
                   {"mu", c.mu()},
                   {"eta", c.eta},
                   {"v_c", {c.v_c[0], c.v_c[1], c.v_c[2]}},
                   {"t_range", {c.t_lo, c.t_hi}},
                   {"x_ball", {{"centre", c.x_c}, {"radius", c.x_radius}}},
                   {"v_radius", c.v_radius},
                   {"degenerate", c.degenerate},
                   {"trace", {{"u", c.u}, {"C_R", c.C_R}, {"levels", c.levels}, {"digest", digest.str()}}},
                   {"provenance", c.provenance}});
  }
  j["certificates"] = arr;
  out << j.dump(2) << "\n";
}

}  // namespace nclb
