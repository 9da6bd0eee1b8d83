#include "nclb/collision/grid_operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "nclb/collision/cancellation.hpp"
#include "nclb/collision/carleman.hpp"
#include "nclb/collision/quadrature.hpp"
#include "nclb/core/errors.hpp"

namespace nclb {

void GridOperatorConfig::validate() const {
  require(n_pol >= 2 && n_az >= 4, "GridOperatorConfig: n_pol >= 2, n_az >= 4");
  require(n_rho >= 4, "GridOperatorConfig: n_rho >= 4");
  require(rho_min_cells > 0.0, "GridOperatorConfig: rho_min_cells > 0");
  require(reach_factor > 0.0, "GridOperatorConfig: reach_factor > 0");
  require(ring_cells > 0.0 && arc_cells > 0.0, "GridOperatorConfig: ring_cells, arc_cells > 0");
}

double unit_cube_riesz(double gamma) {
  // six pyramids over the faces; on each, y = x u, z = x w
  const Rule1D gl = gauss_legendre(48, -1.0, 1.0);
  double J = 0.0;
  for (std::size_t a = 0; a < gl.x.size(); ++a)
    for (std::size_t b = 0; b < gl.x.size(); ++b)
      J += gl.w[a] * gl.w[b] * std::pow(1.0 + gl.x[a] * gl.x[a] + gl.x[b] * gl.x[b], 0.5 * gamma);
  return 6.0 * std::pow(0.5, 3.0 + gamma) / (3.0 + gamma) * J;
}

GridCollisionOperator::GridCollisionOperator(const VelocityGrid<double>& grid, const KernelParams& params,
                                             const GridOperatorConfig& cfg)
    : grid_(grid), params_(params), cfg_(cfg) {
  cfg_.validate();
  params_.validate();
  c_cancel_ = cfg_.c_cancel > 0.0 ? cfg_.c_cancel : c_cancel_analytic(params_);

  const double h = grid_.spacing();
  const double reach = cfg_.reach_factor * grid_.extent();
  pad_ = static_cast<int>(std::ceil(reach / h)) + 2;
  np_ = grid_.n() + 2 * pad_;
  rho_min_ = cfg_.rho_min_cells * h;
  require(reach > 2.0 * rho_min_, "GridCollisionOperator: reach > 2 rho_min");

  const double s = params_.s;
  const Rule1D rr = log_gauss_legendre(cfg_.n_rho, rho_min_, reach);
  for (int m = 0; m < cfg_.n_rho; ++m) {
    rho_.push_back(rr.x[m]);
    rho_w_.push_back(rr.w[m] * std::pow(rr.x[m], -1.0 - 2.0 * s));
  }

  const double db = cfg_.ring_cells * h;
  const int n_rings = static_cast<int>(std::ceil(reach / db));
  for (int j = 0; j < n_rings; ++j) ring_beta_.push_back((j + 0.5) * db);
  const double pw = params_.gamma + 2.0 * s + 1.0;
  ring_coef_.assign(static_cast<std::size_t>(cfg_.n_rho + 1) * n_rings, 0.0);
  for (int m = 0; m <= cfg_.n_rho; ++m) {
    const double rho = m < cfg_.n_rho ? rho_[m] : 0.0;
    for (int j = 0; j < n_rings; ++j) {
      const double frac = std::clamp(((j + 1) * db - rho) / db, 0.0, 1.0);
      if (frac == 0.0) continue;
      const double beta = std::max(ring_beta_[j], rho);
      ring_coef_[static_cast<std::size_t>(m) * n_rings + j] = 2.0 * std::numbers::pi * ring_beta_[j] * db * frac *
                                                              std::pow(beta, pw) *
                                                              carleman_angular(2.0 * std::atan(rho / beta), params_);
    }
  }

  for (const auto& node : sphere_rule(cfg_.n_pol, cfg_.n_az, Vec3d::UnitZ(), true)) {
    Direction d;
    d.weight = node.w;
    Vec3d e1, e2;
    orthonormal_frame(node.dir, e1, e2);
    d.ring_begin.push_back(0);
    for (int j = 0; j < n_rings; ++j) {
      const double beta = ring_beta_[j];
      const int n_psi = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * beta / (cfg_.arc_cells * h))));
      std::map<long, double> taps;
      for (int l = 0; l < n_psi; ++l) {
        const double psi = (l + 0.5) * 2.0 * std::numbers::pi / n_psi;
        std::array<long, 8> off;
        std::array<double, 8> w;
        build_stencil(beta * (std::cos(psi) * e1 + std::sin(psi) * e2), off, w);
        for (int c = 0; c < 8; ++c)
          if (w[c] != 0.0) taps[off[c]] += w[c] / n_psi;
      }
      for (const auto& [o, w] : taps) {
        d.off.push_back(o);
        d.w.push_back(w);
      }
      d.ring_begin.push_back(static_cast<int>(d.off.size()));
    }
    d.plus_bias.resize(rho_.size());
    d.minus_bias.resize(rho_.size());
    d.plus_off.resize(rho_.size());
    d.minus_off.resize(rho_.size());
    d.plus_w.resize(rho_.size());
    d.minus_w.resize(rho_.size());
    for (std::size_t m = 0; m < rho_.size(); ++m) {
      build_stencil(rho_[m] * node.dir, d.plus_off[m], d.plus_w[m], &d.plus_bias[m]);
      build_stencil(-rho_[m] * node.dir, d.minus_off[m], d.minus_w[m], &d.minus_bias[m]);
    }
    build_stencil(rho_min_ * node.dir, d.inner_plus_off, d.inner_plus_w, &d.inner_plus_bias);
    build_stencil(-rho_min_ * node.dir, d.inner_minus_off, d.inner_minus_w, &d.inner_minus_bias);
    dirs_.push_back(std::move(d));
  }
  build_convolution_weights();
}

void GridCollisionOperator::build_stencil(const Vec3d& disp, std::array<long, 8>& off, std::array<double, 8>& w,
                                          Vec3d* bias) const {
  const double h = grid_.spacing();
  const Vec3d u = disp / h;
  const Eigen::Vector3d base = u.array().floor();
  const Vec3d fr = u - base;
  if (bias) *bias = 0.5 * h * h * fr.cwiseProduct(Vec3d::Ones() - fr);
  const long stride[3] = {static_cast<long>(np_) * np_, np_, 1};
  for (int c = 0; c < 8; ++c) {
    double wc = 1.0;
    long o = 0;
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
      const int bit = (c >> (2 - a)) & 1;
      const long idx = static_cast<long>(base[a]) + bit;
      if (std::abs(idx) > pad_) inside = false;
      wc *= bit ? fr[a] : 1.0 - fr[a];
      o += idx * stride[a];
    }
    off[c] = inside ? o : 0;
    w[c] = inside ? wc : 0.0;
  }
}

void GridCollisionOperator::build_convolution_weights() {
  const int n = grid_.n();
  const int m = 2 * n - 1;
  const double h = grid_.spacing();
  const double g = params_.gamma;
  conv_w_.resize(static_cast<Eigen::Index>(m) * m * m);
  const Rule1D sub = gauss_legendre(4, -0.5, 0.5);
  const double centre = unit_cube_riesz(g);
  for (int a = -(n - 1); a <= n - 1; ++a)
    for (int b = -(n - 1); b <= n - 1; ++b)
      for (int c = -(n - 1); c <= n - 1; ++c) {
        double w;
        const int cheb = std::max({std::abs(a), std::abs(b), std::abs(c)});
        if (cheb == 0) {
          w = centre;
        } else if (cheb <= 2) {
          // 4^3 sub-cells with a 4^3 Gauss rule each
          w = 0.0;
          for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
              for (int r = 0; r < 4; ++r)
                for (int i = 0; i < 4; ++i)
                  for (int j = 0; j < 4; ++j)
                    for (int k = 0; k < 4; ++k) {
                      const Vec3d y(a - 0.375 + 0.25 * p + 0.25 * sub.x[i], b - 0.375 + 0.25 * q + 0.25 * sub.x[j],
                                    c - 0.375 + 0.25 * r + 0.25 * sub.x[k]);
                      w += sub.w[i] * sub.w[j] * sub.w[k] / 64.0 * std::pow(y.norm(), g);
                    }
        } else {
          w = std::pow(std::sqrt(double(a * a + b * b + c * c)), g);
        }
        conv_w_[(static_cast<Eigen::Index>(a + n - 1) * m + (b + n - 1)) * m + (c + n - 1)] =
            w * std::pow(h, 3.0 + g);
      }
}

std::size_t GridCollisionOperator::stencil_size() const {
  std::size_t n = 0;
  for (const auto& d : dirs_) n += d.off.size();
  return n;
}

GridCollisionOperator::ApplyInfo GridCollisionOperator::apply(const Eigen::ArrayXd& f, Eigen::ArrayXd& q,
                                                              Eigen::ArrayXd* loss_rate) const {
  const int n = grid_.n();
  const long N = static_cast<long>(n) * n * n;
  require(f.size() == N, "GridCollisionOperator::apply: field size matches grid");
  q.setZero(N);
  Eigen::ArrayXd gain_ns = Eigen::ArrayXd::Zero(N), loss_all = Eigen::ArrayXd::Zero(N);

  std::vector<double> fp(static_cast<std::size_t>(np_) * np_ * np_, 0.0);
  const double* fpp = fp.data();
  auto pidx = [&](int i, int j, int k) {
    return (static_cast<long>(i + pad_) * np_ + (j + pad_)) * np_ + (k + pad_);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) fp[pidx(i, j, k)] = f[grid_.index(i, j, k)];

  // node second differences f_aa, zero-extended like f
  std::array<std::vector<double>, 3> curv;
  const bool correct = cfg_.curvature_correction;
  if (correct) {
    const long stride[3] = {static_cast<long>(np_) * np_, np_, 1};
    const double h2 = grid_.spacing() * grid_.spacing();
    for (int a = 0; a < 3; ++a) {
      curv[a].assign(fp.size(), 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const long p = pidx(i, j, k);
            curv[a][p] = (fp[p + stride[a]] + fp[p - stride[a]] - 2.0 * fp[p]) / h2;
          }
    }
  }
  const double* cx = correct ? curv[0].data() : nullptr;
  const double* cy = correct ? curv[1].data() : nullptr;
  const double* cz = correct ? curv[2].data() : nullptr;
  auto value = [&](long base, const std::array<long, 8>& o, const std::array<double, 8>& w, const Vec3d& bias) {
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) acc += w[c] * fpp[base + o[c]];
    if (!correct) return acc;
    double bx = 0.0, by = 0.0, bz = 0.0;
    for (int c = 0; c < 8; ++c) {
      bx += w[c] * cx[base + o[c]];
      by += w[c] * cy[base + o[c]];
      bz += w[c] * cz[base + o[c]];
    }
    return std::max(0.0, acc - bias[0] * bx - bias[1] * by - bias[2] * bz);
  };

  const int n_rings = static_cast<int>(ring_beta_.size());
  const int n_rho = static_cast<int>(rho_.size());
  const double s = params_.s;
  const double tail = std::pow(rho_min_, -2.0 * s) / (2.0 - 2.0 * s);

  const int m = 2 * n - 1;
  std::vector<long> nz;
  for (long idx = 0; idx < N; ++idx)
    if (f[idx] != 0.0) nz.push_back(idx);

#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < N; ++idx) {
    const int i = static_cast<int>(idx / (static_cast<long>(n) * n));
    const int j = static_cast<int>((idx / n) % n);
    const int k = static_cast<int>(idx % n);
    const long base = pidx(i, j, k);
    const double fv = f[idx];
    std::vector<double> A(n_rings);
    double qs = 0.0, loss = 0.0;
    for (const auto& d : dirs_) {
      for (int r = 0; r < n_rings; ++r) {
        double acc = 0.0;
        for (int t = d.ring_begin[r]; t < d.ring_begin[r + 1]; ++t) acc += d.w[t] * fpp[base + d.off[t]];
        A[r] = acc;
      }
      double dq = 0.0, dl = 0.0;
      for (int mm = 0; mm <= n_rho; ++mm) {
        const double* coef = &ring_coef_[static_cast<std::size_t>(mm) * n_rings];
        double P = 0.0;
        for (int r = 0; r < n_rings; ++r) P += coef[r] * A[r];
        if (P == 0.0) continue;
        double pair, wgt;
        if (mm < n_rho) {
          pair = value(base, d.plus_off[mm], d.plus_w[mm], d.plus_bias[mm]) +
                 value(base, d.minus_off[mm], d.minus_w[mm], d.minus_bias[mm]);
          wgt = rho_w_[mm];
        } else {
          pair = value(base, d.inner_plus_off, d.inner_plus_w, d.inner_plus_bias) +
                 value(base, d.inner_minus_off, d.inner_minus_w, d.inner_minus_bias);
          wgt = tail;
        }
        dq += wgt * P * (pair - 2.0 * fv);
        dl += wgt * P * 2.0;
      }
      qs += d.weight * dq;
      loss += d.weight * dl;
    }

    double conv = 0.0;
    if (fv != 0.0) {
      for (long jdx : nz) {
        const int a = i - static_cast<int>(jdx / (static_cast<long>(n) * n));
        const int b = j - static_cast<int>((jdx / n) % n);
        const int c = k - static_cast<int>(jdx % n);
        conv += conv_w_[(static_cast<Eigen::Index>(a + n - 1) * m + (b + n - 1)) * m + (c + n - 1)] * f[jdx];
      }
    }
    q[idx] = qs;
    gain_ns[idx] = fv * conv;
    loss_all[idx] = loss;
  }

  ApplyInfo info;
  info.c_effective = c_cancel_;
  const double sum_ns = gain_ns.sum();
  if (cfg_.conserve_mass && sum_ns > 0.0) {
    const double c = -q.sum() / sum_ns;
    if (c > 0.0) info.c_effective = c;
  }
  q += info.c_effective * gain_ns;
  info.max_loss_rate = loss_all.maxCoeff();
  if (loss_rate) *loss_rate = loss_all;
  return info;
}

}  // namespace nclb
