#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nclb/collision/cone.hpp"
#include "nclb/core/phase_field.hpp"
#include "nclb/envelope/iteration.hpp"
#include "nclb/envelope/theorem.hpp"
#include "nclb/solver/solver.hpp"

namespace nclb {

/// One additive piece of the initial data.
struct InitialComponent {
  enum class Kind { maxwellian, ball };
  Kind kind = Kind::ball;
  /// ball: delta on {|x - x0| < x_radius} x B_r(v0); x_radius defaults to r
  double delta = 1.0;
  double r = 0.5;
  double x0 = 0.0;
  double x_radius = 0.0;
  Vec3d v0 = Vec3d::Zero();
  /// maxwellian: density rho, bulk velocity u, temperature T (x-independent)
  double rho = 1.0;
  Vec3d u = Vec3d::Zero();
  double T = 1.0;
};

struct CarlemanCommand {
  std::string battery = "default";      // default | trivial
  std::string resolution = "standard";  // standard | coarse | refined
  int points = 20;
  double tolerance = 0.02;
};

struct ConeCommand {
  double r = 1.0;
  double delta = 1.0;
  Vec3d v0 = Vec3d::Zero();
  Vec3d direction = Vec3d::UnitX();
  std::vector<double> speeds = {2.0, 10.0, 50.0};
  ConeOptions options;
};

struct EnvelopeCommand {
  IterationConfig iteration;
  double r = 1.0;
  Vec3d v0 = Vec3d::Zero();
  int slope_lo = 6;
  int slope_hi = 12;
};

struct ExperimentConfig {
  std::string command;
  KernelParams kernel;
  double v_extent = 2.5;
  int v_n = 24;
  bool periodic = false;
  double x_length = 1.0;
  int x_n = 1;
  /// overrides of registry constants (Lambda, C_push, c_spread)
  std::map<std::string, double> registry;
  std::vector<InitialComponent> initial;
  std::string output = "out";
  std::uint64_t seed = 7;
  SolverConfig solver;
  TheoremConfig theorem;
  EnvelopeCommand envelope;
  CarlemanCommand carleman;
  ConeCommand cone;

  void validate() const;
  VelocityGrid<double> velocity_grid() const;
  SpaceGrid<double> space_grid() const;
};

/// Parses nested key/value YAML; unknown keys are rejected by name.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

/// Samples the initial-data descriptor on the configured grids.
PhaseFieldd initial_field(const ExperimentConfig& cfg);

}  // namespace nclb
