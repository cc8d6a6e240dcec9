#include "kshock/macro_micro.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kshock {

Vec5 chi(const FluidState& reference, const Vec3& xi)
{
  const Vec3 z = (xi - reference.velocity()) / std::sqrt(reference.temperature());
  Vec5 c;
  c << 1.0, z(0), z(1), z(2), (z.squaredNorm() - 3.0) / std::sqrt(6.0);
  return c;
}

double EquilibriumBasis::off_diagonal() const
{
  double d = 0.0;
  for (int i = 0; i < gram.rows(); ++i)
    for (int j = 0; j < gram.cols(); ++j)
      if (i != j) d = std::max(d, std::abs(gram(i, j)) / std::sqrt(gram(i, i) * gram(j, j)));
  return d;
}

EquilibriumBasis build_basis(const VelocitySpace& space)
{
  const QuadratureGrid& grid = space.grid();
  const int N = grid.size();
  const Vec& M = space.reference_maxwellian();
  EquilibriumBasis b;
  b.phi_raw.resize(N, 5);
  for (int i = 0; i < N; ++i) b.phi_raw.row(i) = (chi(space.reference(), grid.nodes[i]) * M(i)).transpose();
  const Vec w = space.weight(0.5);
  b.gram = b.phi_raw.transpose() * w.asDiagonal() * b.phi_raw;
  b.phi = b.phi_raw;
  for (int j = 0; j < 5; ++j) {
    for (int k = 0; k < j; ++k) b.phi.col(j) -= b.phi.col(k).dot(w.asDiagonal() * b.phi.col(j)) * b.phi.col(k);
    b.phi.col(j) /= std::sqrt(b.phi.col(j).dot(w.asDiagonal() * b.phi.col(j)));
  }
  return b;
}

Projectors::Projectors(const VelocitySpace& space, const EquilibriumBasis& basis)
    : phi_(basis.phi)
    , w_(space.weight(0.5))
{
}

Vec Projectors::macro(const Vec& f) const
{
  return phi_ * (phi_.transpose() * w_.cwiseProduct(f));
}

Mat Projectors::macro_matrix() const
{
  return phi_ * phi_.transpose() * w_.asDiagonal();
}

Mat Projectors::micro_matrix() const
{
  return Mat::Identity(phi_.rows(), phi_.rows()) - macro_matrix();
}

FormSpace galerkin_space(const GalerkinSystem& g, double s, double lambda)
{
  const int m = g.size();
  FormSpace X;
  X.s = s;
  X.lambda = lambda;
  X.gram = g.gram_s(s) + lambda * Mat::Identity(m, m);
  X.metric = g.japanese_gram_s(s) + lambda * g.W;
  X.macro = Mat::Identity(m, m).leftCols(5);
  X.micro = Mat::Identity(m, m).rightCols(m - 5);
  return X;
}

FormSpace nodal_space(const VelocitySpace& space, const EquilibriumBasis& basis, double s, double lambda)
{
  const QuadratureGrid& grid = space.grid();
  const int N = grid.size();
  Vec jw(N);
  for (int i = 0; i < N; ++i) jw(i) = japanese(grid.nodes[i]);
  const Vec w = space.weight(s) + lambda * space.weight(0.5);
  FormSpace X;
  X.s = s;
  X.lambda = lambda;
  X.gram = w.asDiagonal();
  X.metric = jw.cwiseProduct(w).asDiagonal();
  X.macro = basis.phi;
  // V = {f : phi^T D f = 0} with an H^{1/2}-orthonormal basis D^{-1/2} Q, where Q
  // completes D^{1/2} phi; this keeps the restricted metric well conditioned.
  const Vec d = space.weight(0.5).cwiseSqrt();
  Eigen::HouseholderQR<Mat> qr(d.asDiagonal() * basis.phi);
  Mat Q = qr.householderQ();
  X.micro = d.cwiseInverse().asDiagonal() * Q.rightCols(N - 5);
  return X;
}

CoercivityReport coercivity_gap(const Mat& L, const FormSpace& X)
{
  const Mat& P = X.micro;
  const Mat GL = X.gram * L;
  Mat S = -(P.transpose() * GL * P);
  S = 0.5 * (S + S.transpose()).eval();
  const Mat Wr = P.transpose() * X.metric * P;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(S, Wr);
  require(es.info() == Eigen::Success, ErrorKind::solver, "coercivity eigensolve failed");
  CoercivityReport rep;
  rep.s = X.s;
  rep.lambda = X.lambda;
  rep.delta = es.eigenvalues()(0);
  rep.minimizer = P * es.eigenvectors().col(0);
  for (int j = 0; j < X.macro.cols(); ++j) {
    const Vec f = X.macro.col(j);
    rep.kernel_quotient = std::max(rep.kernel_quotient, std::abs(f.dot(GL * f)) / f.dot(X.metric * f));
  }
  return rep;
}

double collision_frequency(const FluidState& u, const Vec3& xi)
{
  const double sigma = std::sqrt(u.temperature());
  const double a = (xi - u.velocity()).norm();
  double mean;
  if (a < 1e-8 * sigma) {
    mean = 2.0 * sigma * std::sqrt(2.0 / pi);
  } else {
    mean = sigma * std::sqrt(2.0 / pi) * std::exp(-0.5 * a * a / (sigma * sigma)) +
           (a + sigma * sigma / a) * std::erf(a / (sigma * std::sqrt(2.0)));
  }
  return 2.0 * pi * u.rho * mean;
}

namespace {

// Scan of a function of xi that depends on (xi_1, |xi_perp|) only.
template <class F>
double axial_scan(double radius, F f)
{
  const int K = 400;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2 * K; ++i) {
    const double x1 = radius * (i - K) / K;
    for (int j = 0; j <= K; ++j) {
      const double rp = radius * j / K;
      best = std::max(best, f(Vec3(x1, rp, 0.0)));
    }
  }
  return best;
}

double min_generalized(const Mat& S, const Mat& W)
{
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()), W, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::solver, "generalized eigensolve failed");
  return es.eigenvalues()(0);
}

}  // namespace

LambdaRule lambda_rule(const GalerkinSystem& g, double s)
{
  require(s >= 0.5 && s < 1.0, ErrorKind::config, "weight s must lie in [1/2, 1)");
  const FluidState& ref = g.basis.reference();
  const Mat L = g.dq(g.reference);
  LambdaRule rule;
  rule.s = s;
  rule.delta0 = coercivity_gap(L, galerkin_space(g, 0.5, 0.0)).delta;
  require(rule.delta0 > 0.0, ErrorKind::assumption, "no coercivity at s = 1/2");
  const double radius = 20.0 + ref.velocity().norm();
  rule.delta1 = -0.5 * axial_scan(radius, [&](const Vec3& xi) { return -collision_frequency(ref, xi) / japanese(xi); });
  const Mat Gs = g.gram_s(s), Ws = g.japanese_gram_s(s);
  // C = max eig of (delta1 W_s + sym(G_s L), G_s).
  rule.C = std::max(0.0, -min_generalized(-(rule.delta1 * Ws + Gs * L), Gs));
  if (rule.C == 0.0 || s == 0.5) return rule;
  const double reach = 2.0 * rule.C / rule.delta1;
  rule.lambda = std::max(0.0, axial_scan(reach + ref.velocity().norm(), [&](const Vec3& xi) {
    const double j = japanese(xi);
    const double excess = rule.C - 0.5 * rule.delta1 * j;
    if (excess <= 0.0) return 0.0;
    return 2.0 * excess * std::pow(maxwellian_at(ref, xi), 1.0 - 2.0 * s) / (rule.delta0 * j);
  }));
  return rule;
}

CoercivityReport weighted_coercivity(const GalerkinSystem& g, double s)
{
  const LambdaRule rule = lambda_rule(g, s);
  return coercivity_gap(g.dq(g.reference), galerkin_space(g, s, rule.lambda));
}

double kawashima_gamma(const Compensator& c, const Mat& A, const Mat& L, const Mat& W, double theta)
{
  const Mat KA = theta * (c.K11 + c.K12 + c.K21) * A;
  return min_generalized(KA - L, W);
}

Compensator build_compensator(const Mat& A, const Mat& L, const Mat& W, int n)
{
  const int m = static_cast<int>(A.rows());
  require(n > 0 && n < m, ErrorKind::config, "compensator: macro dimension out of range");
  Compensator c;
  c.n = n;
  const Mat A11 = A.topLeftCorner(n, n), A21 = A.bottomLeftCorner(m - n, n);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A11 + A11.transpose()));
  const Vec lam = es.eigenvalues();
  const Mat R = es.eigenvectors();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  // Clusters of equal eigenvalues (relative tolerance 1e-8).
  std::vector<int> cluster(n, 0);
  for (int i = 1; i < n; ++i) cluster[i] = cluster[i - 1] + (lam(i) - lam(i - 1) > 1e-8 * scale ? 1 : 0);
  c.coupling = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= cluster[n - 1]; ++k) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (cluster[i] == k) idx.push_back(i);
    Mat Rk(n, idx.size());
    for (size_t j = 0; j < idx.size(); ++j) Rk.col(j) = R.col(idx[j]);
    const Mat Ak = A21 * Rk;
    Eigen::JacobiSVD<Mat> svd(Ak, Eigen::ComputeFullV);
    // A wide block has a kernel that the thin singular values do not show.
    const double smin = Ak.rows() < Ak.cols() ? 0.0 : svd.singularValues()(Ak.cols() - 1);
    if (smin < c.coupling) c.coupling = smin;
    if (smin <= 1e-10 * std::max(1.0, A.norm())) {
      std::ostringstream msg;
      msg << "genuine coupling fails: A11 eigenvector with eigenvalue " << lam(idx[0]) << " lies in ker A21:";
      const Vec v = Rk * svd.matrixV().col(Ak.cols() - 1);
      for (int i = 0; i < n; ++i) msg << ' ' << v(i);
      fail(ErrorKind::assumption, msg.str());
    }
  }
  const Mat B = R.transpose() * A21.transpose() * A21 * R;
  Mat Kh = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (cluster[i] != cluster[j]) Kh(i, j) = -2.0 * B(i, j) / (lam(j) - lam(i));
  c.K11 = Mat::Zero(m, m);
  const Mat K11 = R * Kh * R.transpose();
  c.K11.topLeftCorner(n, n) = 0.5 * (K11 - K11.transpose());
  c.K12 = Mat::Zero(m, m);
  c.K12.topRightCorner(n, m - n) = A.topRightCorner(n, m - n);
  c.K21 = Mat::Zero(m, m);
  c.K21.bottomLeftCorner(m - n, n) = -A21;

  double best = -std::numeric_limits<double>::infinity();
  int kbest = 0;
  for (int k = 0; k < 8; ++k) {
    const double theta = std::pow(10.0, -0.5 * k);
    const double g = kawashima_gamma(c, A, L, W, theta);
    c.sweep.emplace_back(theta, g);
    if (g > best) {
      best = g;
      kbest = k;
    }
  }
  if (best <= 0.0) {
    c.theta = c.sweep[kbest].first;
    c.gamma = best;
    return c;
  }
  // Largest sweep point meeting the half-maximum rule, then bisection towards the next larger one.
  int k = 0;
  while (c.sweep[k].second < 0.5 * best) ++k;
  double lo = std::log(c.sweep[k].first);
  if (k == 0) {
    c.theta = 1.0;
  } else {
    double hi = std::log(c.sweep[k - 1].first);
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      (kawashima_gamma(c, A, L, W, std::exp(mid)) >= 0.5 * best ? lo : hi) = mid;
    }
    c.theta = std::exp(lo);
  }
  c.gamma = kawashima_gamma(c, A, L, W, c.theta);
  return c;
}

Compensator build_compensator(const RelaxationSystem& sys)
{
  return build_compensator(sys.A, sys.L(), sys.metric, sys.n);
}

Mat macro_block(const Compensator& c, const Mat& A)
{
  const Mat KA = (c.K11 + c.K12 + c.K21) * A;
  return 0.5 * (KA + KA.transpose()).topLeftCorner(c.n, c.n);
}

}  // namespace kshock
