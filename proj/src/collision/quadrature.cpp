#include "nclb/collision/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <map>

#include "nclb/core/errors.hpp"

namespace nclb {

namespace {

Rule1D reference_rule(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = beta;
    J(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    r.x[i] = es.eigenvalues()(i);
    r.w[i] = 2.0 * v0 * v0;
  }
  return r;
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre: n >= 1");
  thread_local std::map<int, Rule1D> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, reference_rule(n)).first;
  Rule1D r = it->second;
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = a + half * (r.x[i] + 1.0);
    r.w[i] *= half;
  }
  return r;
}

Rule1D log_gauss_legendre(int n, double a, double b) {
  require(a > 0.0 && b > a, "log_gauss_legendre: 0 < a < b");
  Rule1D r = gauss_legendre(n, std::log(a), std::log(b));
  for (int i = 0; i < n; ++i) {
    r.x[i] = std::exp(r.x[i]);
    r.w[i] *= r.x[i];
  }
  return r;
}

Rule1D concat(const Rule1D& lhs, const Rule1D& rhs) {
  Rule1D r = lhs;
  r.x.insert(r.x.end(), rhs.x.begin(), rhs.x.end());
  r.w.insert(r.w.end(), rhs.w.begin(), rhs.w.end());
  return r;
}

void orthonormal_frame(const Vec3d& n, Vec3d& e1, Vec3d& e2) {
  const Vec3d helper = std::abs(n[0]) < 0.9 ? Vec3d::UnitX() : Vec3d::UnitY();
  e1 = n.cross(helper).normalized();
  e2 = n.cross(e1);
}

namespace {

std::vector<SphereNode> product_rule(int n_polar, int n_azimuth, const Vec3d& axis, double cos_lo, double cos_hi) {
  Vec3d e1, e2;
  const Vec3d a = axis.normalized();
  orthonormal_frame(a, e1, e2);
  const Rule1D gl = gauss_legendre(n_polar, cos_lo, cos_hi);
  const double dphi = 2.0 * std::numbers::pi / n_azimuth;
  std::vector<SphereNode> out;
  out.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  for (int i = 0; i < n_polar; ++i) {
    const double c = gl.x[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = (j + 0.5) * dphi;
      out.push_back({c * a + s * (std::cos(phi) * e1 + std::sin(phi) * e2), gl.w[i] * dphi});
    }
  }
  return out;
}

}  // namespace

std::vector<SphereNode> sphere_rule(int n_polar, int n_azimuth, const Vec3d& axis, bool half) {
  return product_rule(n_polar, n_azimuth, axis, half ? 0.0 : -1.0, 1.0);
}

std::vector<SphereNode> cap_rule(int n_polar, int n_azimuth, const Vec3d& axis, double half_angle) {
  return product_rule(n_polar, n_azimuth, axis, std::cos(std::min(half_angle, std::numbers::pi)), 1.0);
}

}  // namespace nclb
