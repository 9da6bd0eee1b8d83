#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nclb/core/kernel_params.hpp"
#include "nclb/core/phase_field.hpp"

namespace nclb {

template <typename Scalar>
struct Moments {
  Scalar mass = 0;
  Scalar energy = 0;
  /// integral of (1 + |v|^max(2, gamma+2s)) f dv
  Scalar weighted = 0;
};

template <typename Scalar>
struct MomentReport {
  std::vector<Moments<Scalar>> per_x;
  Moments<Scalar> sup;
};

/// Midpoint-rule velocity moments at every spatial point plus their suprema.
template <typename Scalar>
MomentReport<Scalar> moment_weighted(const PhaseField<Scalar>& f, const KernelParams& params) {
  const auto& vg = f.v_grid();
  const Scalar w = vg.cell_volume();
  const Scalar k = static_cast<Scalar>(std::max(2.0, params.gamma_2s()));
  MomentReport<Scalar> out;
  out.per_x.resize(f.n_x());
  for (int ix = 0; ix < f.n_x(); ++ix) {
    Moments<Scalar> m;
    for (std::size_t iv = 0; iv < f.block_size(); ++iv) {
      const Scalar fv = f(ix, iv);
      if (fv == Scalar(0)) continue;
      const Scalar v2 = vg.node(iv).squaredNorm();
      m.mass += fv;
      m.energy += v2 * fv;
      m.weighted += (Scalar(1) + std::pow(std::sqrt(v2), k)) * fv;
    }
    m.mass *= w;
    m.energy *= w;
    m.weighted *= w;
    out.per_x[ix] = m;
    out.sup.mass = std::max(out.sup.mass, m.mass);
    out.sup.energy = std::max(out.sup.energy, m.energy);
    out.sup.weighted = std::max(out.sup.weighted, m.weighted);
  }
  return out;
}

/// (integral f^p dv)^(1/p) per spatial point. Only finite p >= 1.
template <typename Scalar>
std::vector<Scalar> lp_norm(const PhaseField<Scalar>& f, Scalar p) {
  require(std::isfinite(static_cast<double>(p)) && p >= Scalar(1), "lp_norm: finite p >= 1");
  const Scalar w = f.v_grid().cell_volume();
  std::vector<Scalar> out(f.n_x());
  for (int ix = 0; ix < f.n_x(); ++ix) {
    Scalar acc = 0;
    for (std::size_t iv = 0; iv < f.block_size(); ++iv) acc += std::pow(f(ix, iv), p);
    out[ix] = std::pow(acc * w, Scalar(1) / p);
  }
  return out;
}

struct HydroBounds {
  double K0 = 0.0;
  double P0 = 0.0;
  double p = 1.0;

  void validate(const KernelParams& params) const {
    require(K0 > 0.0, "HydroBounds: K0 > 0");
    if (params.gamma_2s() < 0.0) {
      require(P0 > 0.0, "HydroBounds: P0 > 0 when gamma + 2s < 0");
      require(p > 3.0 / (3.0 + params.gamma_2s()), "HydroBounds: p > 3/(3+gamma+2s) when gamma + 2s < 0");
    }
  }
};

template <typename Scalar>
struct MassCore {
  Scalar x0 = 0;
  Vec3<Scalar> v0 = Vec3<Scalar>::Zero();
};

namespace detail {

/// Candidate centres on the half-spacing lattice, so that both nodes and cell
/// corners (e.g. the origin on an even grid) can serve as ball centres.
template <typename Scalar>
std::vector<Scalar> half_lattice(const VelocityGrid<Scalar>& g) {
  std::vector<Scalar> c;
  for (int m = 1; m < 2 * g.n(); ++m) c.push_back(-g.extent() + Scalar(m) * g.spacing() / 2);
  return c;
}

/// f >= delta at every node of the discrete ball B_r(c) (which must be nonempty).
template <typename Scalar>
bool block_exceeds(const PhaseField<Scalar>& f, int ix, const Vec3<Scalar>& c, Scalar r, Scalar delta) {
  const auto& g = f.v_grid();
  int lo[3], hi[3];
  for (int d = 0; d < 3; ++d) {
    lo[d] = static_cast<int>(std::ceil(g.fractional(c[d] - r) - Scalar(1e-12)));
    hi[d] = static_cast<int>(std::floor(g.fractional(c[d] + r) + Scalar(1e-12)));
  }
  bool any = false;
  for (int i = lo[0]; i <= hi[0]; ++i)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int k = lo[2]; k <= hi[2]; ++k) {
        const Vec3<Scalar> v = g.node(i, j, k);
        if ((v - c).norm() >= r) continue;
        // A ball reaching outside the box cannot be certified.
        if (i < 0 || j < 0 || k < 0 || i >= g.n() || j >= g.n() || k >= g.n()) return false;
        if (f(ix, g.index(i, j, k)) < delta) return false;
        any = true;
      }
  return any;
}

template <typename Scalar>
std::vector<int> x_ball(const SpaceGrid<Scalar>& xg, int ixc, Scalar r) {
  std::vector<int> out;
  for (int ix = 0; ix < xg.n(); ++ix)
    if (xg.is_homogeneous() || std::abs(xg.separation(xg.coord(ix), xg.coord(ixc))) < r) out.push_back(ix);
  return out;
}

template <typename Scalar>
bool core_at(const PhaseField<Scalar>& f, int ixc, const Vec3<Scalar>& vc, Scalar delta, Scalar r) {
  const auto xs = x_ball(f.x_grid(), ixc, r);
  if (xs.empty()) return false;
  for (int ix : xs)
    if (!block_exceeds(f, ix, vc, r, delta)) return false;
  return true;
}

}  // namespace detail

/// Search for (x0, v0) with f >= delta on the discrete B_r(x0) x B_r(v0).
/// x0 ranges over x nodes, v0 over the half-spacing lattice; the first hit in
/// order of increasing |v0| wins.
template <typename Scalar>
std::optional<MassCore<Scalar>> check_mass_core(const PhaseField<Scalar>& f, Scalar delta, Scalar r) {
  require(delta > Scalar(0) && r > Scalar(0), "check_mass_core: delta > 0 and r > 0");
  const auto lat = detail::half_lattice(f.v_grid());
  std::vector<Vec3<Scalar>> centres;
  for (Scalar a : lat)
    for (Scalar b : lat)
      for (Scalar c : lat) centres.emplace_back(a, b, c);
  std::stable_sort(centres.begin(), centres.end(),
                   [](const auto& p, const auto& q) { return p.squaredNorm() < q.squaredNorm(); });
  const Scalar fmax = f.values().size() ? f.values().maxCoeff() : Scalar(0);
  if (fmax < delta) return std::nullopt;
  for (int ix = 0; ix < f.n_x(); ++ix)
    for (const auto& vc : centres)
      if (detail::core_at(f, ix, vc, delta, r)) return MassCore<Scalar>{f.x_grid().coord(ix), vc};
  return std::nullopt;
}

template <typename Scalar>
struct WellDistributedReport {
  bool ok = true;
  /// witness (x_m, v_m) per x node; absent where the search failed
  std::vector<std::optional<MassCore<Scalar>>> witness;
  std::vector<int> failures;
};

/// For every x node, find x_m in B_R(x), v_m in B_R(0) with f >= delta on
/// B_r(x_m) x B_r(v_m).
template <typename Scalar>
WellDistributedReport<Scalar> check_well_distributed(const PhaseField<Scalar>& f, Scalar R, Scalar delta, Scalar r) {
  require(R >= r && r > Scalar(0), "check_well_distributed: R >= r > 0");
  require(delta > Scalar(0), "check_well_distributed: delta > 0");
  const auto lat = detail::half_lattice(f.v_grid());
  std::vector<Vec3<Scalar>> centres;
  for (Scalar a : lat)
    for (Scalar b : lat)
      for (Scalar c : lat) {
        Vec3<Scalar> v(a, b, c);
        if (v.norm() < R) centres.push_back(v);
      }
  std::stable_sort(centres.begin(), centres.end(),
                   [](const auto& p, const auto& q) { return p.squaredNorm() < q.squaredNorm(); });

  const auto& xg = f.x_grid();
  // Cores per x node are shared by all queries, so compute them once.
  std::vector<std::optional<Vec3<Scalar>>> core(xg.n());
  for (int ix = 0; ix < xg.n(); ++ix)
    for (const auto& vc : centres)
      if (detail::core_at(f, ix, vc, delta, r)) {
        core[ix] = vc;
        break;
      }

  WellDistributedReport<Scalar> rep;
  rep.witness.resize(xg.n());
  for (int ix = 0; ix < xg.n(); ++ix) {
    std::optional<MassCore<Scalar>> best;
    Scalar best_d = std::numeric_limits<Scalar>::infinity();
    for (int jx = 0; jx < xg.n(); ++jx) {
      if (!core[jx]) continue;
      const Scalar d = std::abs(xg.separation(xg.coord(jx), xg.coord(ix)));
      if (d < R && d < best_d) {
        best_d = d;
        best = MassCore<Scalar>{xg.coord(jx), *core[jx]};
      }
    }
    rep.witness[ix] = best;
    if (!best) {
      rep.ok = false;
      rep.failures.push_back(ix);
    }
  }
  return rep;
}

}  // namespace nclb
