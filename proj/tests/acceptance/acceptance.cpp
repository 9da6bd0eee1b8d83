// Acceptance battery: one PASS/FAIL line per criterion; exit status 0 iff all pass.
// Usage: acceptance [criterion ...]   (default: all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nclb/barrier/barrier.hpp"
#include "nclb/cli/commands.hpp"
#include "nclb/collision/cancellation.hpp"
#include "nclb/collision/cone.hpp"
#include "nclb/collision/equivalence.hpp"
#include "nclb/collision/lambda.hpp"
#include "nclb/core/registry.hpp"
#include "nclb/envelope/iteration.hpp"

using namespace nclb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << x;
  return s.str();
}

const fs::path config_dir = NCLB_CONFIG_DIR;
const fs::path work_dir = NCLB_WORK_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1: sigma form against Carleman + cancellation form
Outcome representation_equivalence() {
  const auto p = make_kernel(0.0, 0.5);
  const auto rep = run_equivalence(default_equivalence_battery(20, 7), p, SigmaQuadrature{}, CarlemanQuadrature{});
  const bool ok = rep.all_converged && rep.max_residual <= 0.02 && rep.max_seconds <= 10.0 && rep.total_seconds <= 900.0;
  return {ok, std::to_string(rep.rows.size()) + " evaluations, max residual " + fmt(rep.max_residual) +
                  ", slowest " + fmt(rep.max_seconds, 3) + " s, total " + fmt(rep.total_seconds, 3) + " s" +
                  (rep.all_converged ? "" : ", extrapolation not converged")};
}

// 2: cancellation constant is v- and g-independent
Outcome cancellation_constant() {
  const auto f = bump(Vec3d(0.1, 0.0, 0.0), 1.0);
  const std::vector<VelocityFunction> gs = {gaussian(Vec3d::Zero(), 0.8), gaussian(Vec3d(0.3, -0.2, 0.1), 0.5, 2.0),
                                            bump(Vec3d(-0.2, 0.0, 0.2), 1.6)};
  const std::vector<Vec3d> vs = {Vec3d(0, 0, 0), Vec3d(0.4, 0.1, 0), Vec3d(-0.3, 0.3, 0.2), Vec3d(0.2, -0.5, 0.3)};
  bool ok = true;
  std::string detail;
  for (const auto& [gamma, s] : {std::pair{-1.0, 0.5}, std::pair{0.0, 0.25}}) {
    const auto p = make_kernel(gamma, s);
    double worst_v = 0.0;
    std::vector<double> means;
    for (const auto& g : gs) {
      std::vector<double> r;
      for (const auto& v : vs) r.push_back(measure_c_cancel(f, g, v, p, SigmaQuadrature{}, CarlemanQuadrature{}).ratio_difference);
      const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
      double mean = 0.0;
      for (double x : r) mean += x / r.size();
      worst_v = std::max(worst_v, (*hi - *lo) / mean);
      means.push_back(mean);
    }
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    const double g_spread = (*hi - *lo) / *lo;
    ok = ok && worst_v <= 0.02 && g_spread <= 0.01;
    detail += std::string(detail.empty() ? "" : "; ") + "(" + fmt(gamma) + "," + fmt(s) + "): C " + fmt(means[0], 6) + " (analytic " + fmt(c_cancel_analytic(p), 6) +
              "), v-spread " + fmt(worst_v, 3) + ", g-spread " + fmt(g_spread, 3);
  }
  return {ok, detail};
}

// 3: Q(M, M)(0) in the Carleman + cancellation form under refinement
Outcome equilibrium_annihilation() {
  const auto p = make_kernel(-1.0, 0.5);
  const auto M = maxwellian();
  CarlemanQuadrature base;
  base.n_rho = 8;
  base.n_pol = 4;
  base.n_az = 8;
  base.plane.n_radial = 8;
  base.plane.n_angular = 8;
  base.rho_min = 0.1;
  const double C = c_cancel_analytic(p);
  std::vector<double> q;
  for (int l = 0; l < 3; ++l) {
    const auto cq = base.refined(l);
    const ConvolutionQuadrature vq{32 << l, 16 << l, 32 << l};
    q.push_back(std::abs(q_s_carleman(M, M, Vec3d::Zero(), p, cq, false).value + q_ns(M, M, Vec3d::Zero(), p, C, vq)));
  }
  const double r1 = q[0] / q[1], r2 = q[1] / q[2];
  return {r1 >= 3.0 && r2 >= 3.0, "|Q(M,M)(0)| = " + fmt(q[0], 3) + ", " + fmt(q[1], 3) + ", " + fmt(q[2], 3) +
                                      "; ratios " + fmt(r1, 3) + ", " + fmt(r2, 3)};
}

// 4: pointwise bound constant, stable under refinement, stored and reused
Outcome lambda_bound() {
  const auto p = make_kernel(-1.0, 0.5);
  std::vector<LambdaReport> reps;
  for (int l = 0; l < 2; ++l) {
    const ConvolutionQuadrature vq{32 << l, 16 << l, 32 << l};
    reps.push_back(measure_lambda(default_lambda_battery(), p, CarlemanQuadrature{}.refined(l), vq));
  }
  ConstantsRegistry reg;
  store_lambda(reg, reps[0]);
  const double L0 = reps[0].lambda_convolution, L1 = reps[1].lambda_convolution;
  const double drift = std::abs(L1 - L0) / L0;
  // the theorem configs carry the stored value
  const auto cfg = load_config((config_dir / "theorem.yaml").string());
  const double reuse = std::abs(cfg.theorem.Lambda - reg.get("Lambda")) / reg.get("Lambda");
  const bool ok = std::isfinite(L0) && L0 > 0.0 && drift <= 0.10 && reuse <= 1e-5;
  return {ok, "Lambda " + fmt(L0, 6) + " -> " + fmt(L1, 6) + " under refinement (" + fmt(100 * drift, 3) +
                  "%), " + std::to_string(reps[0].rows.size()) + " samples, provenance " +
                  to_string(reg.provenance("Lambda")) + ", theorem config uses " + fmt(cfg.theorem.Lambda, 6)};
}

// 5: cone of nondegeneracy
Outcome cone() {
  const auto p = make_kernel(-1.0, 0.5);
  const auto rep = cone_of_nondegeneracy({Vec3d(2, 0, 0), Vec3d(10, 0, 0), Vec3d(50, 0, 0)}, Vec3d::Zero(), 1.0, 1.0, p);
  const bool ok = rep.mu > 0.0 && rep.lambda > 0.0 && rep.violations == 0 && rep.validation.size() >= 300;
  std::string w;
  for (const auto& c : rep.cones) w += fmt(c.measure * (1.0 + c.v.norm())) + " ";
  return {ok, "|A(v)|(1+|v|) = " + w + "-> mu " + fmt(rep.mu) + ", lambda " + fmt(rep.lambda) + ", " +
                  std::to_string(rep.violations) + " violations over " + std::to_string(rep.validation.size()) +
                  " samples"};
}

Vec3d random_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3d v;
  do v = Vec3d(u(rng), u(rng), u(rng));
  while (v.norm() > 1.0);
  return radius * v;
}

// 6: transport identity of the push barrier
Outcome push_transport() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int good = 0;
  double lo = 1e300, hi = 0.0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    PushBarrierSpec s;
    s.c1 = 0.1 + u(rng);
    s.c2 = 0.5 + 0.5 * u(rng);
    s.r = 0.3 + 0.7 * u(rng);
    s.tau = 0.2 + 0.8 * u(rng);
    s.v0 = random_ball(rng, 2.0);
    s.x0 = random_ball(rng, 1.0);
    const double t = 0.5 * u(rng);
    // points with quadratic form in (1/2, 1), where the barrier is not a quadratic polynomial
    const double form = 0.5 + 0.5 * u(rng), share = 0.1 + 0.8 * u(rng);
    const Vec3d dv = random_ball(rng, 1.0).normalized() * std::sqrt(share * form) * s.r / s.tau;
    const Vec3d v = s.v0 + dv;
    const Vec3d x = s.x0 + t * v + random_ball(rng, 1.0).normalized() * std::sqrt((1.0 - share) * form) * s.r;
    const double h = 1e-3 * s.r;
    const double ratio = push_barrier_transport_residual(s, t, x, v, h) / push_barrier_transport_residual(s, t, x, v, h / 2);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (ratio >= 3.5 && ratio <= 4.5) ++good;
  }
  return {good == n, std::to_string(good) + "/" + std::to_string(n) + " points with residual ratio in [3.5, 4.5], range [" +
                         fmt(lo) + ", " + fmt(hi) + "]"};
}

// 7: spread-barrier ODE identity and cutoff certificates
Outcome spread_and_cutoffs() {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int good = 0;
  double lo = 1e300, hi = 0.0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    SpreadBarrierSpec s;
    s.params = make_kernel(-1.0 + 1.5 * u(rng), 0.2 + 0.6 * u(rng));
    s.alpha = 0.1 + u(rng);
    s.xi = 0.05 + 0.4 * u(rng);
    s.R = 0.5 + 2.0 * u(rng);
    s.rho = 0.2 + u(rng);
    s.ell = 0.1 + 0.8 * u(rng);
    s.C1 = 0.5 + 2.0 * u(rng);
    // times up to three relaxation times, steps a fixed fraction of 1/K
    const double K = s.K();
    const double t = 3.0 * u(rng) / K, h = 0.02 / K;
    const double ratio = spread_barrier_ode_residual(s, t, h) / spread_barrier_ode_residual(s, t, h / 2);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (ratio >= 3.5 && ratio <= 4.5) ++good;
  }
  int hv = 0, gv = 0;
  double mh = 0.0, mg = 0.0;
  for (double xi : {0.5, 0.25, 0.125, 1.0 / 64}) {
    const auto c = sample_cutoff_bounds(xi, 2.0 * xi, 10000, 99);
    hv += c.hessian_violations;
    gv += c.gradient_violations;
    mh = std::max(mh, c.max_hessian_scaled);
    mg = std::max(mg, c.max_gradient_scaled);
  }
  return {good == n && hv == 0 && gv == 0,
          std::to_string(good) + "/" + std::to_string(n) + " ODE ratios in [3.5, 4.5] (range [" + fmt(lo) + ", " +
              fmt(hi) + "]); cutoffs over 4 x 10^4 samples: max |D2 phi| xi^2 " + fmt(mh) + ", max |grad psi| rho " +
              fmt(mg) + ", " + std::to_string(hv + gv) + " violations"};
}

// 8: iteration law
Outcome iteration_law() {
  IterationConfig c;
  c.params = make_kernel(0.0, 0.5);
  const auto t0 = Clock::now();
  const auto tr = run_iteration(c);
  const double u = fit_double_exponential(tr);
  const double slope = double_exponential_slope(tr, 6, 12);
  const double sec = seconds_since(t0);
  const double err = std::abs(slope - std::log(2.0)) / std::log(2.0);
  const bool ok = tr.smallness_holds() && u < 1.0 && err <= 0.05 && sec <= 1.0;
  return {ok, std::string("smallness ") + (tr.smallness_holds() ? "holds" : "fails") + " at all " +
                  std::to_string(tr.levels.size()) + " levels, u " + fmt(u, 6) + ", slope " + fmt(slope, 5) +
                  " (log 2 within " + fmt(100 * err, 3) + "%), " + fmt(1e6 * sec, 3) + " us"};
}

// 9: vacuum filling and certificate soundness on the full theorem pipeline
Outcome vacuum_filling() {
  const auto t0 = Clock::now();
  CliOptions opt;
  opt.out = (work_dir / "theorem").string();
  const auto cfg = apply_options(load_config((config_dir / "theorem.yaml").string()), opt);
  std::ostringstream log;
  const int code = run_command(cfg, opt, log);
  const double sec = seconds_since(t0);

  // (a) min f over |v| <= 2 at every output time t >= dt
  std::ifstream diag(fs::path(opt.out) / "diagnostics.csv");
  std::string line;
  std::getline(diag, line);
  double min_core = std::numeric_limits<double>::infinity();
  int rows = 0;
  while (std::getline(diag, line)) {
    std::vector<double> col;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) col.push_back(std::stod(cell));
    if (col[0] < cfg.solver.dt - 1e-12) continue;
    min_core = std::min(min_core, col[6]);
    ++rows;
  }
  const bool filled = rows > 0 && min_core > 0.0;

  // (b) certificates and their checks
  const auto j = nlohmann::json::parse(slurp(fs::path(opt.out) / "certificates.json"));
  const int viol = j["violations"], slices = j["certified_slices"];
  const std::size_t certs = j["certificates"].size();
  const bool ok = code == exit_pass && filled && viol == 0 && slices >= 5 && sec <= 1800.0;
  return {ok, "min f on |v| <= 2 over " + std::to_string(rows) + " output times: " + fmt(min_core, 3) + "; " +
                  std::to_string(certs) + " certificates on " + std::to_string(slices) + " slices, " +
                  std::to_string(j["restarts"].get<int>()) + " restarts, " + std::to_string(viol) +
                  " violations at noise margin " + fmt(cfg.theorem.noise_margin) + "; " + fmt(sec, 4) + " s"};
}

// 10: repeated theorem runs produce byte-identical reports
Outcome determinism() {
  std::vector<fs::path> dirs = {work_dir / "determinism_a", work_dir / "determinism_b"};
  for (const auto& d : dirs) {
    fs::remove_all(d);
    CliOptions opt;
    opt.out = d.string();
    opt.seed = 7;
    const auto cfg = apply_options(load_config((config_dir / "theorem_small.yaml").string()), opt);
    std::ostringstream log;
    run_command(cfg, opt, log);
  }
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(dirs[0])) {
    if (!e.is_regular_file()) continue;
    ++files;
    if (slurp(e.path()) != slurp(dirs[1] / e.path().filename())) ++differ;
  }
  return {files >= 6 && differ == 0,
          std::to_string(files) + " report files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"representation equivalence", representation_equivalence},
      {"cancellation constant", cancellation_constant},
      {"equilibrium annihilation", equilibrium_annihilation},
      {"pointwise bound constant", lambda_bound},
      {"cone of nondegeneracy", cone},
      {"push-barrier transport identity", push_transport},
      {"spread-barrier ODE and cutoffs", spread_and_cutoffs},
      {"iteration law", iteration_law},
      {"vacuum filling and certificates", vacuum_filling},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  fs::create_directories(work_dir);
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << id << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << "  "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
