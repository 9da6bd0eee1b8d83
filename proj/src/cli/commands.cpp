#include "nclb/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nclb/collision/equivalence.hpp"
#include "nclb/collision/lambda.hpp"
#include "nclb/core/errors.hpp"
#include "nclb/core/field_io.hpp"
#include "nclb/core/registry.hpp"

namespace nclb {

namespace {

namespace fs = std::filesystem;

std::ofstream open_report(const ExperimentConfig& cfg, const std::string& name) {
  const fs::path path = fs::path(cfg.output) / name;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "output: cannot write '" + path.string() + "'");
  out << std::setprecision(12);
  return out;
}

nlohmann::json vec_json(const Vec3d& v) { return {v[0], v[1], v[2]}; }

void resolution(const std::string& name, SigmaQuadrature& sq, CarlemanQuadrature& cq) {
  if (name == "refined") {
    sq = sq.refined(1);
    cq = cq.refined(1);
  } else if (name == "coarse") {
    sq.n_theta = 8;
    sq.n_phi = 8;
    sq.n_r = 8;
    sq.n_pol = 8;
    sq.n_az = 8;
    sq.theta_min = 0.7;
    sq.n_band = 2;
    cq.n_rho = 8;
    cq.n_pol = 4;
    cq.n_az = 8;
    cq.rho_min = 0.5;
    cq.n_band = 2;
    cq.plane.n_radial = 8;
    cq.plane.n_angular = 8;
  }
}

}  // namespace

ExperimentConfig apply_options(ExperimentConfig cfg, const CliOptions& opt) {
  require(opt.tolerance_scale > 0.0, "options: --tolerance-scale > 0");
  require(opt.workers >= 0, "options: --workers >= 0");
  if (!opt.out.empty()) cfg.output = opt.out;
  if (opt.seed) cfg.seed = *opt.seed;
  cfg.cone.options.seed = cfg.seed;
  if (opt.fast) {
    cfg.carleman.points = std::min(cfg.carleman.points, 4);
    cfg.cone.options.n_calibration = std::min(cfg.cone.options.n_calibration, 20);
    cfg.cone.options.n_validation = std::min(cfg.cone.options.n_validation, 40);
  }
#ifdef _OPENMP
  if (opt.workers > 0) omp_set_num_threads(opt.workers);
#endif
  return cfg;
}

int cmd_verify_carleman(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log) {
  const auto& cc = cfg.carleman;
  SigmaQuadrature sq;
  CarlemanQuadrature cq;
  resolution(cc.resolution, sq, cq);
  const auto battery =
      cc.battery == "trivial" ? trivial_equivalence_battery() : default_equivalence_battery(cc.points, cfg.seed);
  const auto rep = run_equivalence(battery, cfg.kernel, sq, cq);
  const double tol = cc.tolerance * opt.tolerance_scale;

  std::map<std::string, double> worst;
  std::map<std::string, bool> converged;
  for (const auto& row : rep.rows) {
    worst[row.label] = std::max(worst[row.label], row.residual);
    if (!converged.count(row.label)) converged[row.label] = true;
    converged[row.label] = converged[row.label] && row.converged;
  }
  nlohmann::json j;
  j["battery"] = cc.battery;
  j["resolution"] = cc.resolution;
  j["tolerance"] = tol;
  j["max_residual"] = rep.max_residual;
  j["all_converged"] = rep.all_converged;
  j["evaluations"] = rep.rows.size();
  nlohmann::json cases = nlohmann::json::array();
  std::string failing_tol, failing_conv;
  for (const auto& [label, r] : worst) {
    cases.push_back({{"label", label}, {"max_residual", r}, {"converged", converged[label]}, {"pass", r <= tol}});
    if (!converged[label] && failing_conv.empty()) failing_conv = label;
    if (r > tol && failing_tol.empty()) failing_tol = label;
  }
  j["cases"] = cases;
  j["pass"] = rep.all_converged && rep.max_residual <= tol;

  auto csv = open_report(cfg, "equivalence.csv");
  write_equivalence_csv(csv, rep);
  auto js = open_report(cfg, "equivalence.json");
  js << j.dump(2) << "\n";
  auto dat = open_report(cfg, "equivalence.dat");
  dat << "# |v| residual\n";
  for (const auto& row : rep.rows) dat << row.v.norm() << ' ' << row.residual << '\n';

  log << "verify-carleman: " << rep.rows.size() << " evaluations, max residual " << rep.max_residual
      << ", tolerance " << tol << ", " << rep.total_seconds << " s\n";
  if (!rep.all_converged) {
    log << "verify-carleman: convergence warning: extrapolation did not settle in case '" << failing_conv << "'\n";
    return exit_convergence;
  }
  if (rep.max_residual > tol) {
    log << "verify-carleman: case '" << failing_tol << "' exceeds the tolerance (residual " << worst[failing_tol]
        << ")\n";
    return exit_tolerance;
  }
  return exit_pass;
}

int cmd_cone(const ExperimentConfig& cfg, const CliOptions&, std::ostream& log) {
  const auto& cc = cfg.cone;
  const Vec3d dir = cc.direction.normalized();
  std::vector<Vec3d> vs;
  for (double s : cc.speeds) vs.push_back(cc.v0 + s * dir);
  const auto rep = cone_of_nondegeneracy(vs, cc.v0, cc.r, cc.delta, cfg.kernel, cc.options);

  nlohmann::json j;
  j["mu"] = rep.mu;
  j["lambda"] = rep.lambda;
  j["violations"] = rep.violations;
  j["calibration_samples"] = rep.calibration.size();
  j["validation_samples"] = rep.validation.size();
  nlohmann::json cones = nlohmann::json::array();
  for (const auto& c : rep.cones)
    cones.push_back({{"v", vec_json(c.v)},
                     {"axis", vec_json(c.axis)},
                     {"half_width", c.half_width},
                     {"full_sphere", c.full_sphere},
                     {"measure", c.measure},
                     {"analytic_measure", c.analytic_measure},
                     {"measure_times_weight", c.measure * (1.0 + c.v.norm())}});
  j["cones"] = cones;
  j["pass"] = rep.mu > 0.0 && rep.lambda > 0.0 && rep.violations == 0;
  auto js = open_report(cfg, "cone.json");
  js << j.dump(2) << "\n";

  auto csv = open_report(cfg, "cone_samples.csv");
  csv << "set,vx,vy,vz,vpx,vpy,vpz,kernel,weight,ratio\n";
  auto dat = open_report(cfg, "cone_samples.dat");
  dat << "# |v| ratio set(0 calibration, 1 validation)\n";
  auto emit = [&](const char* set, int tag, const std::vector<ConeSample>& ss) {
    for (const auto& s : ss) {
      const double ratio = s.kernel / s.weight;
      csv << set << ',' << s.v[0] << ',' << s.v[1] << ',' << s.v[2] << ',' << s.v_prime[0] << ',' << s.v_prime[1]
          << ',' << s.v_prime[2] << ',' << s.kernel << ',' << s.weight << ',' << ratio << '\n';
      dat << s.v.norm() << ' ' << ratio << ' ' << tag << '\n';
    }
  };
  emit("calibration", 0, rep.calibration);
  emit("validation", 1, rep.validation);

  log << "cone: mu " << rep.mu << ", lambda " << rep.lambda << ", " << rep.violations << " violations over "
      << rep.validation.size() << " validation samples\n";
  return j["pass"].get<bool>() ? exit_pass : exit_tolerance;
}

int cmd_envelope(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log) {
  const auto& ec = cfg.envelope;
  IterationConfig ic = ec.iteration;
  ic.params = cfg.kernel;
  const auto trace = run_iteration(ic);
  const auto cert = certificate_from_trace(trace, ec.r, ec.v0);
  const double u = std::exp(fit_log_double_exponential(trace));
  const double slope = double_exponential_slope(trace, ec.slope_lo, ec.slope_hi);
  const double slope_err = std::abs(slope - std::log(2.0)) / std::log(2.0);

  auto csv = open_report(cfg, "trace.csv");
  csv << "n,T,xi,rho,R,log_ell,log_smallness,log_smallness_bound\n";
  auto dat = open_report(cfg, "trace.dat");
  dat << "# n log_ell log(log(1/ell))\n";
  for (const auto& l : trace.levels) {
    csv << l.n << ',' << l.T << ',' << l.xi << ',' << l.rho << ',' << l.R << ',' << l.log_ell << ','
        << l.log_smallness << ',' << l.log_smallness_bound << '\n';
    dat << l.n << ' ' << l.log_ell << ' ' << (l.log_ell < 0.0 ? std::log(-l.log_ell) : NAN) << '\n';
  }

  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << cert.trace_digest;
  nlohmann::json j;
  j["q"] = trace.q;
  j["levels"] = trace.levels.size();
  j["underflow_level"] = trace.underflow_level;
  j["smallness_holds"] = trace.smallness_holds();
  j["u"] = u;
  j["slope"] = {{"range", {ec.slope_lo, ec.slope_hi}}, {"value", slope}, {"relative_error", slope_err}};
  j["certificate"] = {{"log_mu", cert.log_mu},
                      {"mu", cert.mu()},
                      {"eta", cert.eta},
                      {"v_c", vec_json(cert.v_c)},
                      {"t_range", {cert.t_lo, cert.t_hi}},
                      {"v_radius", cert.v_radius},
                      {"C_R", cert.C_R},
                      {"degenerate", cert.degenerate},
                      {"digest", digest.str()},
                      {"provenance", cert.provenance}};
  const bool pass = trace.smallness_holds() && u < 1.0 && slope_err <= 0.05 * opt.tolerance_scale;
  j["pass"] = pass;
  auto js = open_report(cfg, "certificate.json");
  js << j.dump(2) << "\n";

  log << "envelope: u " << u << ", mu " << cert.mu() << ", eta " << cert.eta << ", slope " << slope
      << (trace.smallness_holds() ? ", smallness holds" : ", smallness FAILS") << "\n";
  return pass ? exit_pass : exit_tolerance;
}

int cmd_simulate(const ExperimentConfig& cfg, const CliOptions&, std::ostream& log) {
  const PhaseFieldd f0 = initial_field(cfg);
  const Solver solver(cfg.kernel, cfg.velocity_grid(), cfg.solver);
  const auto tr = solver.run(f0);

  auto csv = open_report(cfg, "diagnostics.csv");
  write_diagnostics_csv(csv, tr.diagnostics);
  auto dat = open_report(cfg, "diagnostics.dat");
  dat << "# t mass energy min_f K0_monitor clipped_mass min_core\n" << std::setprecision(10);
  for (const auto& r : tr.diagnostics)
    dat << r.t << ' ' << r.mass << ' ' << r.energy << ' ' << r.min_f << ' ' << r.K0_monitor << ' ' << r.clipped_mass
        << ' ' << r.min_core << '\n';
  fs::create_directories(fs::path(cfg.output) / "snapshots");
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    std::ostringstream name;
    name << "snapshots/snap_" << std::setw(4) << std::setfill('0') << i << ".nclb";
    save_field((fs::path(cfg.output) / name.str()).string(), tr.snapshots[i]);
  }
  const auto& first = tr.diagnostics.front();
  const auto& last = tr.diagnostics.back();
  log << "simulate: " << tr.diagnostics.size() - 1 << " steps, mass " << first.mass << " -> " << last.mass
      << ", clipped " << tr.clipped_total << ", " << tr.snapshots.size() << " snapshots\n";
  return exit_pass;
}

int cmd_theorem(const ExperimentConfig& cfg, const CliOptions&, std::ostream& log) {
  TheoremConfig tc = cfg.theorem;
  ConstantsRegistry reg;
  if (cfg.registry.count("Lambda")) {
    reg.set("Lambda", tc.Lambda);
  } else {
    log << "theorem: measuring Lambda on the default battery\n";
    store_lambda(reg, measure_lambda(default_lambda_battery(), cfg.kernel, CarlemanQuadrature{}));
    tc.Lambda = reg.get("Lambda");
  }
  reg.set("C_push", tc.push_constant(), cfg.registry.count("C_push") ? Provenance::configured : Provenance::derived);
  reg.set("c_spread", tc.c_spread);

  const PhaseFieldd f0 = initial_field(cfg);
  const Solver solver(cfg.kernel, cfg.velocity_grid(), cfg.solver);
  const auto rep = orchestrate_theorem(f0, solver, cfg.kernel, tc);

  auto txt = open_report(cfg, "step_log.txt");
  write_step_log_text(txt, rep);
  auto csv = open_report(cfg, "step_log.csv");
  write_step_log_csv(csv, rep);
  auto cj = open_report(cfg, "certificates.json");
  write_certificates_json(cj, rep);
  auto ck = open_report(cfg, "checks.csv");
  write_checks_csv(ck, rep);
  auto po = open_report(cfg, "push_ordering.csv");
  write_ordering_csv(po, rep.push_ordering);
  auto dg = open_report(cfg, "diagnostics.csv");
  write_diagnostics_csv(dg, rep.diagnostics);
  auto dat = open_report(cfg, "min_core.dat");
  dat << "# t min_core min_f\n";
  for (const auto& r : rep.diagnostics) dat << r.t << ' ' << r.min_core << ' ' << r.min_f << '\n';

  nlohmann::json rj;
  for (const auto& [name, e] : reg.entries()) rj[name] = {{"value", e.value}, {"provenance", to_string(e.provenance)}};
  auto rs = open_report(cfg, "registry.json");
  rs << rj.dump(2) << "\n";

  const int viol = rep.violations();
  const int slices = rep.certified_slices();
  log << "theorem: " << rep.certificates.size() << " certificates over " << slices << " time slices, "
      << rep.restarts << " restarts, " << viol << " violations\n";
  return viol == 0 && slices > 0 ? exit_pass : exit_tolerance;
}

int run_command(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log) {
  if (cfg.command == "verify-carleman") return cmd_verify_carleman(cfg, opt, log);
  if (cfg.command == "cone") return cmd_cone(cfg, opt, log);
  if (cfg.command == "envelope") return cmd_envelope(cfg, opt, log);
  if (cfg.command == "simulate") return cmd_simulate(cfg, opt, log);
  if (cfg.command == "theorem") return cmd_theorem(cfg, opt, log);
  throw ConfigError("config: unknown command '" + cfg.command + "'");
}

int run_guarded(const std::string& config_path, const CliOptions& opt, std::ostream& log, std::ostream& err) {
  try {
    const ExperimentConfig cfg = apply_options(load_config(config_path), opt);
    return run_command(cfg, opt, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << "\n";
    return exit_convergence;
  } catch (const MonitorError& e) {
    err << "monitor failure: " << e.what() << "\n";
    return exit_convergence;
  }
}

}  // namespace nclb
