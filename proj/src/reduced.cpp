#include "kshock/reduced.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kshock {

namespace {

// Index of the eigenvalue of minimal modulus and the next smallest modulus.
std::pair<int, double> smallest_eigen(const Eigen::VectorXcd& ev)
{
  int k = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (std::abs(ev(i)) < std::abs(ev(k))) k = i;
  double next = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ev.size(); ++i)
    if (i != k) next = std::min(next, std::abs(ev(i)));
  return {k, next};
}

double tracked_alpha(const ReducedFlux& flux, const Vec& u, double target)
{
  Eigen::VectorXcd ev = Eigen::EigenSolver<Mat>(flux.dh(u), false).eigenvalues();
  int k = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (std::abs(ev(i) - target) < std::abs(ev(k) - target)) k = i;
  return ev(k).real();
}

}  // namespace

SlowField slow_field(const ReducedFlux& flux, const Vec& u, double fd_step)
{
  const int n = flux.dim();
  Mat J = flux.dh(u);
  Eigen::EigenSolver<Mat> es(J);
  auto [k, next] = smallest_eigen(es.eigenvalues());
  require(std::abs(es.eigenvalues()(k).imag()) < 1e-10 * (1.0 + J.norm()), ErrorKind::assumption,
          "slow eigenvalue of dh* is not real");
  SlowField sf;
  sf.alpha = es.eigenvalues()(k).real();
  sf.ratio = std::isfinite(next) ? std::abs(sf.alpha) / next : 0.0;
  sf.r = es.eigenvectors().col(k).real().normalized();
  Eigen::EigenSolver<Mat> et(J.transpose());
  Eigen::VectorXcd evt = et.eigenvalues();
  int kt = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(evt(i) - es.eigenvalues()(k)) < std::abs(evt(kt) - es.eigenvalues()(k))) kt = i;
  sf.l = et.eigenvectors().col(kt).real();
  sf.l /= sf.l.dot(sf.r);
  sf.grad_alpha = Vec(n);
  const double scale = 1.0 + u.norm();
  for (int i = 0; i < n; ++i) {
    Vec up = u, um = u;
    up(i) += fd_step * scale;
    um(i) -= fd_step * scale;
    sf.grad_alpha(i) = (tracked_alpha(flux, up, sf.alpha) - tracked_alpha(flux, um, sf.alpha)) / (2.0 * fd_step * scale);
  }
  sf.grad_alpha_r = sf.grad_alpha.dot(sf.r);
  if (sf.grad_alpha_r > 0.0) {
    sf.r = -sf.r;
    sf.l = -sf.l;
    sf.grad_alpha_r = -sf.grad_alpha_r;
  }
  return sf;
}

Mat left_kernel(const Mat& b, double tol)
{
  Eigen::JacobiSVD<Mat> svd(b, Eigen::ComputeFullU);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax) ++rank;
  return svd.matrixU().rightCols(b.rows() - rank);
}

ReducedSystem::ReducedSystem(RelaxationSystem sys, NewtonOptions opt)
    : sys_(std::move(sys))
    , opt_(opt)
{
  sys_.check();
  v0_ = solve_equilibrium(sys_, sys_.reference.head(sys_.n), sys_.reference.tail(sys_.r), opt_);
}

Vec ReducedSystem::v_star(const Vec& u) const { return solve_equilibrium(sys_, u, v0_, opt_); }

Vec ReducedSystem::h(const Vec& u) const { return sys_.A11() * u + sys_.A12() * v_star(u); }

CEPoint ReducedSystem::at(const Vec& u) const
{
  const int n = sys_.n;
  CEPoint p;
  p.v = v_star(u);
  Mat J = sys_.dq(u, p.v);
  Eigen::PartialPivLU<Mat> qv(J.rightCols(sys_.r));
  p.dv = -qv.solve(J.leftCols(n));
  require(p.dv.allFinite(), ErrorKind::assumption, "singular d_v q at the equilibrium");
  const Mat A11 = sys_.A11(), A12 = sys_.A12(), A21 = sys_.A21(), A22 = sys_.A22();
  p.h = A11 * u + A12 * p.v;
  p.dh = A11 + A12 * p.dv;
  p.c = qv.solve(A21 + A22 * p.dv - p.dv * p.dh);
  p.b = -A12 * p.c;
  return p;
}

FluxPoint ReducedSystem::point(const Vec& u) const
{
  CEPoint p = at(u);
  return {std::move(p.h), std::move(p.dh), std::move(p.b)};
}

ReducedSystem::FDCheck ReducedSystem::fd_check(const Vec& u, double step) const
{
  const int n = sys_.n;
  CEPoint p = at(u);
  Mat dv_fd(sys_.r, n), dh_fd(n, n);
  const double hstep = step * (1.0 + u.norm());
  for (int i = 0; i < n; ++i) {
    Vec up = u, um = u;
    up(i) += hstep;
    um(i) -= hstep;
    Vec vp = v_star(up), vm = v_star(um);
    dv_fd.col(i) = (vp - vm) / (2.0 * hstep);
    dh_fd.col(i) = (h(up) - h(um)) / (2.0 * hstep);
  }
  Mat J = sys_.dq(u, p.v);
  Mat ift = p.dv + J.rightCols(sys_.r).partialPivLu().solve(J.leftCols(n));
  FDCheck c;
  c.dv = (p.dv - dv_fd).norm() / std::max(1e-300, std::max(p.dv.norm(), 1.0));
  c.dh = (p.dh - dh_fd).norm() / std::max(1e-300, p.dh.norm());
  c.ift = ift.norm() / std::max(1.0, p.dv.norm());
  return c;
}

LinearChange::LinearChange(std::shared_ptr<const ReducedFlux> inner, Mat S)
    : inner_(std::move(inner))
    , S_(std::move(S))
    , lu_(S_)
{
}

Vec LinearChange::h(const Vec& w) const { return lu_.solve(inner_->h(S_ * w)); }
Mat LinearChange::dh(const Vec& w) const { return lu_.solve(inner_->dh(S_ * w) * S_); }
Mat LinearChange::b(const Vec& w) const { return lu_.solve(inner_->b(S_ * w) * S_); }
Vec LinearChange::base() const { return lu_.solve(inner_->base()); }

}  // namespace kshock
