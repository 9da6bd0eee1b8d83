#include "nclb/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nclb/core/errors.hpp"

namespace nclb {

namespace {

void allow(const YAML::Node& node, const std::string& section, const std::set<std::string>& keys) {
  if (!node) return;
  require(node.IsMap(), "config: section '" + section + "' is a key/value map");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    require(keys.count(key) != 0, "config: unknown key '" + key + "' in section '" + section + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
}

void read_vec(const YAML::Node& node, const char* key, Vec3d& out) {
  if (!node || !node[key]) return;
  const auto v = node[key].as<std::vector<double>>();
  require(v.size() == 3, std::string("config: '") + key + "' is a 3-vector");
  out = Vec3d(v[0], v[1], v[2]);
}

KernelParams parse_kernel(const YAML::Node& n) {
  allow(n, "kernel", {"gamma", "s", "b_linear"});
  KernelParams p;
  read(n, "gamma", p.gamma);
  read(n, "s", p.s);
  double a = 0.0;
  read(n, "b_linear", a);
  require(std::abs(a) < 1.0, "config: |kernel.b_linear| < 1");
  if (a != 0.0) {
    p.b_tilde = [a](double u) { return 1.0 + a * u; };
    p.b_min = 1.0 - std::abs(a);
    p.b_max = 1.0 + std::abs(a);
  }
  return p;
}

void parse_collision(const YAML::Node& n, GridOperatorConfig& c) {
  allow(n, "solver.collision",
        {"n_pol", "n_az", "n_rho", "rho_min_cells", "reach_factor", "ring_cells", "arc_cells", "c_cancel",
         "curvature_correction", "conserve_mass"});
  read(n, "n_pol", c.n_pol);
  read(n, "n_az", c.n_az);
  read(n, "n_rho", c.n_rho);
  read(n, "rho_min_cells", c.rho_min_cells);
  read(n, "reach_factor", c.reach_factor);
  read(n, "ring_cells", c.ring_cells);
  read(n, "arc_cells", c.arc_cells);
  read(n, "c_cancel", c.c_cancel);
  read(n, "curvature_correction", c.curvature_correction);
  read(n, "conserve_mass", c.conserve_mass);
}

void parse_solver(const YAML::Node& n, SolverConfig& s) {
  allow(n, "solver",
        {"dt", "t_end", "splitting", "integrator", "cfl", "min_substeps", "max_substeps", "clip_abort", "epsilon_pos",
         "K0_bound", "snapshot_every", "core_radius", "collision"});
  read(n, "dt", s.dt);
  read(n, "t_end", s.t_end);
  std::string split = "lie", integ = "euler";
  read(n, "splitting", split);
  read(n, "integrator", integ);
  require(split == "lie" || split == "strang", "config: solver.splitting is lie or strang");
  require(integ == "euler" || integ == "midpoint", "config: solver.integrator is euler or midpoint");
  s.splitting = split == "lie" ? Splitting::lie : Splitting::strang;
  s.integrator = integ == "euler" ? Integrator::euler : Integrator::midpoint;
  read(n, "cfl", s.cfl);
  read(n, "min_substeps", s.min_substeps);
  read(n, "max_substeps", s.max_substeps);
  read(n, "clip_abort", s.clip_abort);
  read(n, "epsilon_pos", s.epsilon_pos);
  read(n, "K0_bound", s.K0_bound);
  read(n, "snapshot_every", s.snapshot_every);
  read(n, "core_radius", s.core_radius);
  if (n) parse_collision(n["collision"], s.collision);
}

InitialComponent parse_component(const YAML::Node& n) {
  allow(n, "initial_data", {"type", "delta", "r", "x0", "x_radius", "v0", "rho", "u", "T"});
  InitialComponent c;
  std::string type;
  read(n, "type", type);
  require(type == "ball" || type == "maxwellian", "config: initial_data type is ball or maxwellian");
  c.kind = type == "ball" ? InitialComponent::Kind::ball : InitialComponent::Kind::maxwellian;
  read(n, "delta", c.delta);
  read(n, "r", c.r);
  read(n, "x0", c.x0);
  read(n, "x_radius", c.x_radius);
  read_vec(n, "v0", c.v0);
  read(n, "rho", c.rho);
  read_vec(n, "u", c.u);
  read(n, "T", c.T);
  if (c.x_radius <= 0.0) c.x_radius = c.r;
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::set<std::string> commands = {"verify-carleman", "cone", "envelope", "simulate", "theorem"};
  require(commands.count(command) != 0, "config: command is one of verify-carleman, cone, envelope, simulate, theorem");
  kernel.validate();
  velocity_grid();
  space_grid();
  for (const auto& [k, v] : registry) {
    require(k == "Lambda" || k == "C_push" || k == "c_spread", "config: registry entries are Lambda, C_push, c_spread");
    require(v > 0.0, "config: registry entry '" + k + "' > 0");
  }
  for (const auto& c : initial) {
    if (c.kind == InitialComponent::Kind::ball)
      require(c.delta > 0.0 && c.r > 0.0 && c.x_radius > 0.0, "config: ball components have delta, r > 0");
    else
      require(c.rho > 0.0 && c.T > 0.0, "config: maxwellian components have rho, T > 0");
  }
  if (command == "simulate" || command == "theorem") {
    require(!initial.empty(), "config: initial_data is non-empty");
    solver.collision.validate();
  }
  if (command == "theorem") {
    TheoremConfig t = theorem;
    if (!registry.count("Lambda")) t.Lambda = 1.0;  // measured at run time
    t.validate();
  }
  if (command == "envelope") {
    envelope.iteration.validate();
    require(envelope.r > 0.0, "config: envelope.r > 0");
    require(envelope.slope_lo >= 0 && envelope.slope_hi > envelope.slope_lo &&
                envelope.slope_hi <= envelope.iteration.levels,
            "config: 0 <= envelope.slope_range[0] < slope_range[1] <= levels");
  }
  if (command == "verify-carleman") {
    require(carleman.battery == "default" || carleman.battery == "trivial", "config: carleman.battery is default or trivial");
    require(carleman.resolution == "standard" || carleman.resolution == "coarse" || carleman.resolution == "refined",
            "config: carleman.resolution is standard, coarse or refined");
    require(carleman.points >= 1, "config: carleman.points >= 1");
    require(carleman.tolerance > 0.0, "config: carleman.tolerance > 0");
  }
  if (command == "cone") {
    require(cone.r > 0.0 && cone.delta > 0.0, "config: cone.r > 0 and cone.delta > 0");
    require(!cone.speeds.empty(), "config: cone.speeds is non-empty");
    require(cone.direction.norm() > 0.0, "config: cone.direction is non-zero");
    for (double s : cone.speeds) require(s > cone.r, "config: cone.speeds exceed cone.r");
  }
}

VelocityGrid<double> ExperimentConfig::velocity_grid() const { return VelocityGrid<double>(v_extent, v_n); }

SpaceGrid<double> ExperimentConfig::space_grid() const {
  return periodic ? SpaceGrid<double>::periodic(x_length, x_n) : SpaceGrid<double>::homogeneous();
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: not valid YAML (") + e.what() + ")");
  }
  require(root.IsMap(), "config: top level is a key/value map");
  allow(root, "top level",
        {"command", "seed", "output", "kernel", "velocity_grid", "space_grid", "registry", "initial_data", "solver",
         "theorem", "envelope", "carleman", "cone"});
  ExperimentConfig c;
  read(root, "command", c.command);
  read(root, "seed", c.seed);
  read(root, "output", c.output);
  c.kernel = parse_kernel(root["kernel"]);

  const auto vg = root["velocity_grid"];
  allow(vg, "velocity_grid", {"extent", "n"});
  read(vg, "extent", c.v_extent);
  read(vg, "n", c.v_n);

  const auto sg = root["space_grid"];
  allow(sg, "space_grid", {"type", "length", "n"});
  std::string type = "homogeneous";
  read(sg, "type", type);
  require(type == "homogeneous" || type == "periodic", "config: space_grid.type is homogeneous or periodic");
  c.periodic = type == "periodic";
  read(sg, "length", c.x_length);
  read(sg, "n", c.x_n);
  if (!c.periodic) c.x_n = 1;

  if (const auto reg = root["registry"]) {
    require(reg.IsMap(), "config: registry is a key/value map");
    for (const auto& kv : reg) c.registry[kv.first.as<std::string>()] = kv.second.as<double>();
  }

  if (const auto init = root["initial_data"]) {
    require(init.IsSequence(), "config: initial_data is a list of components");
    for (const auto& item : init) c.initial.push_back(parse_component(item));
  }

  parse_solver(root["solver"], c.solver);

  const auto th = root["theorem"];
  allow(th, "theorem",
        {"T", "delta", "r", "x0", "v0", "c_spread", "levels", "restart_margin", "noise_margin", "x_targets"});
  read(th, "T", c.theorem.T);
  read(th, "delta", c.theorem.delta);
  read(th, "r", c.theorem.r);
  read(th, "x0", c.theorem.x0);
  read_vec(th, "v0", c.theorem.v0);
  read(th, "c_spread", c.theorem.c_spread);
  read(th, "levels", c.theorem.levels);
  read(th, "restart_margin", c.theorem.restart_margin);
  read(th, "noise_margin", c.theorem.noise_margin);
  read(th, "x_targets", c.theorem.x_targets);

  const auto en = root["envelope"];
  allow(en, "envelope", {"T0", "t_offset", "c_spread", "ell0", "levels", "r", "v0", "slope_range"});
  c.envelope.iteration.params = c.kernel;
  read(en, "T0", c.envelope.iteration.T0);
  read(en, "t_offset", c.envelope.iteration.t_offset);
  read(en, "c_spread", c.envelope.iteration.c_spread);
  read(en, "ell0", c.envelope.iteration.ell0);
  read(en, "levels", c.envelope.iteration.levels);
  read(en, "r", c.envelope.r);
  read_vec(en, "v0", c.envelope.v0);
  if (en && en["slope_range"]) {
    const auto sr = en["slope_range"].as<std::vector<int>>();
    require(sr.size() == 2, "config: envelope.slope_range has two entries");
    c.envelope.slope_lo = sr[0];
    c.envelope.slope_hi = sr[1];
  }

  const auto cm = root["carleman"];
  allow(cm, "carleman", {"battery", "resolution", "points", "tolerance"});
  read(cm, "battery", c.carleman.battery);
  read(cm, "resolution", c.carleman.resolution);
  read(cm, "points", c.carleman.points);
  read(cm, "tolerance", c.carleman.tolerance);

  const auto co = root["cone"];
  allow(co, "cone", {"r", "delta", "v0", "direction", "speeds", "n_pol", "n_az", "n_calibration", "n_validation", "safety"});
  read(co, "r", c.cone.r);
  read(co, "delta", c.cone.delta);
  read_vec(co, "v0", c.cone.v0);
  read_vec(co, "direction", c.cone.direction);
  read(co, "speeds", c.cone.speeds);
  read(co, "n_pol", c.cone.options.n_pol);
  read(co, "n_az", c.cone.options.n_az);
  read(co, "n_calibration", c.cone.options.n_calibration);
  read(co, "n_validation", c.cone.options.n_validation);
  read(co, "safety", c.cone.options.safety);

  if (c.registry.count("Lambda")) c.theorem.Lambda = c.registry.at("Lambda");
  if (c.registry.count("C_push")) c.theorem.C_push = c.registry.at("C_push");
  if (c.registry.count("c_spread")) {
    c.theorem.c_spread = c.registry.at("c_spread");
    c.envelope.iteration.c_spread = c.registry.at("c_spread");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

PhaseFieldd initial_field(const ExperimentConfig& cfg) {
  PhaseFieldd f(cfg.space_grid(), cfg.velocity_grid());
  const auto xg = cfg.space_grid();
  f.fill([&](double x, const Vec3d& v) {
    double acc = 0.0;
    for (const auto& c : cfg.initial) {
      if (c.kind == InitialComponent::Kind::ball) {
        const bool in_x = xg.is_homogeneous() || std::abs(xg.separation(x, c.x0)) < c.x_radius;
        if (in_x && (v - c.v0).norm() < c.r) acc += c.delta;
      } else {
        acc += c.rho * std::pow(2.0 * M_PI * c.T, -1.5) * std::exp(-(v - c.u).squaredNorm() / (2.0 * c.T));
      }
    }
    return acc;
  });
  return f;
}

}  // namespace nclb
