#include "kshock/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace kshock {

namespace {

Rule1D golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta, double mu0)
{
  const int n = static_cast<int>(alpha.size());
  Mat J = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = alpha[i];
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = std::sqrt(beta[i + 1]);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Rule1D r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(es.eigenvalues()(i));
    r.w.push_back(mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return r;
}

}  // namespace

Rule1D gauss_legendre(int n)
{
  require(n >= 1, ErrorKind::config, "gauss_legendre: n must be positive");
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

Rule1D gauss_hermite(int n)
{
  require(n >= 1, ErrorKind::config, "gauss_hermite: n must be positive");
  std::vector<double> alpha(n, 0.0), beta(n, 0.0);
  for (int k = 1; k < n; ++k) beta[k] = k;
  Rule1D r = golub_welsch(alpha, beta, 1.0);
  // Enforce exact antisymmetry of nodes.
  for (int i = 0; i < n / 2; ++i) {
    double a = 0.5 * (r.x[n - 1 - i] - r.x[i]);
    double w = 0.5 * (r.w[i] + r.w[n - 1 - i]);
    r.x[i] = -a;
    r.x[n - 1 - i] = a;
    r.w[i] = r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

Rule1D gauss_from_measure(const std::vector<double>& x, const std::vector<double>& w, int n)
{
  const int m = static_cast<int>(x.size());
  require(m >= n && n >= 1, ErrorKind::config, "gauss_from_measure: measure too small");
  // Lanczos with full reorthogonalization on diag(x) with start sqrt(w).
  double mu0 = 0.0;
  for (double wi : w) mu0 += wi;
  Mat Qv = Mat::Zero(m, n);
  Vec q(m);
  for (int i = 0; i < m; ++i) q(i) = std::sqrt(w[i] / mu0);
  std::vector<double> alpha(n), beta(n, 0.0);
  Vec xv = Eigen::Map<const Vec>(x.data(), m);
  for (int k = 0; k < n; ++k) {
    Qv.col(k) = q;
    Vec z = xv.cwiseProduct(q);
    alpha[k] = q.dot(z);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= k; ++j) z -= Qv.col(j).dot(z) * Qv.col(j);
    if (k + 1 < n) {
      double b = z.norm();
      beta[k + 1] = b * b;
      q = z / b;
    }
  }
  return golub_welsch(alpha, beta, mu0);
}

Rule1D gauss_radial_t2(int n)
{
  // Discretize t^2 e^{-t^2} on [0, 12] by a fine Gauss-Legendre rule; the tail
  // beyond 12 is below 1e-60.
  const double tmax = 12.0;
  Rule1D gl = gauss_legendre(400);
  std::vector<double> x, w;
  for (size_t i = 0; i < gl.x.size(); ++i) {
    double t = 0.5 * tmax * (gl.x[i] + 1.0);
    x.push_back(t);
    w.push_back(0.5 * tmax * gl.w[i] * t * t * std::exp(-t * t));
  }
  return gauss_from_measure(x, w, n);
}

SphereRule sphere_product_rule(int n_polar, int n_azimuth)
{
  require(n_polar >= 1 && n_azimuth >= 1, ErrorKind::config, "sphere rule: orders must be positive");
  Rule1D gl = gauss_legendre(n_polar);
  SphereRule s;
  for (int i = 0; i < n_polar; ++i) {
    double ct = gl.x[i];
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_azimuth; ++j) {
      double ph = 2.0 * pi * (j + 0.5) / n_azimuth;
      s.nodes.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
      s.w.push_back(gl.w[i] * 2.0 * pi / n_azimuth);
    }
  }
  return s;
}

}  // namespace kshock
