#include "kshock/ns_profile.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kshock {

namespace {

double tracked_alpha(const ReducedFlux& flux, const Vec& u)
{
  Eigen::VectorXcd ev = Eigen::EigenSolver<Mat>(flux.dh(u), false).eigenvalues();
  int k = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (std::abs(ev(i)) < std::abs(ev(k))) k = i;
  return ev(k).real();
}

// Rows spanning the left kernel of b (Lk) and its orthogonal complement (Y).
void split_rows(const Mat& b, double tol, Mat& Lk, Mat& Y)
{
  Eigen::JacobiSVD<Mat> svd(b, Eigen::ComputeFullU);
  const Vec& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  Y = svd.matrixU().leftCols(rank).transpose();
  Lk = svd.matrixU().rightCols(b.rows() - rank).transpose();
}

Mat kernel_basis(const Mat& M, int dim)
{
  if (M.rows() == 0) return Mat::Identity(dim, dim);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim - M.rows());
}

int slow_index(const Eigen::VectorXcd& ev)
{
  int k = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (std::abs(ev(i)) < std::abs(ev(k))) k = i;
  return k;
}

}  // namespace

ShockSpec hugoniot_connect(const ReducedFlux& flux, const SlowField& slow, double epsilon, const Vec* anchor, double tol,
                           int max_iter)
{
  require(epsilon >= 0.0, ErrorKind::config, "shock amplitude must be nonnegative");
  const int n = flux.dim();
  const Vec& r = slow.r;
  Vec a = anchor ? *anchor : Vec(flux.base() - 0.5 * epsilon * r);
  ShockSpec s;
  s.epsilon = epsilon;
  s.direction = r;
  if (epsilon == 0.0) {
    s.u_minus = s.u_plus = a;
    return s;
  }
  double tau = 0.0;
  Vec up = a + epsilon * r;
  for (int it = 0;; ++it) {
    Vec um = a + tau * r;
    FluxPoint pm = flux.point(um), pp = flux.point(up);
    Vec jump = up - um;
    const double dist = jump.norm();
    Vec F(n + 1);
    F.head(n) = pp.h - pm.h;
    F(n) = dist - epsilon;
    Mat J = Mat::Zero(n + 1, n + 1);
    J.block(0, 0, n, 1) = -pm.dh * r;
    J.block(0, 1, n, n) = pp.dh;
    Vec dir = jump / dist;
    J(n, 0) = -dir.dot(r);
    J.block(n, 1, 1, n) = dir.transpose();
    Vec step = J.fullPivLu().solve(F);
    require(step.allFinite(), ErrorKind::solver, "Hugoniot Newton: singular Jacobian");
    tau -= step(0);
    up -= step.tail(n);
    if (step.norm() <= tol * (1.0 + up.norm())) break;
    require(it < max_iter, ErrorKind::solver, "Hugoniot Newton did not converge");
  }
  s.u_minus = a + tau * r;
  s.u_plus = up;
  s.rh_residual = (flux.h(s.u_plus) - flux.h(s.u_minus)).norm();
  s.alpha_minus = tracked_alpha(flux, s.u_minus);
  s.alpha_plus = tracked_alpha(flux, s.u_plus);
  if (!(s.alpha_minus > 0.0 && s.alpha_plus < 0.0)) {
    std::ostringstream msg;
    msg << "Lax condition fails: alpha(u-) = " << s.alpha_minus << ", alpha(u+) = " << s.alpha_plus;
    fail(ErrorKind::assumption, msg.str());
  }
  return s;
}

EndstatePencil reduced_pencil(const ReducedFlux& flux, const Vec& u, const Mat& Lk, const Mat& Y)
{
  const int n = flux.dim();
  FluxPoint p = flux.point(u);
  EndstatePencil e;
  e.Z = kernel_basis(Lk * p.dh, n);
  Mat YbZ = Y * p.b * e.Z;
  e.E = YbZ.fullPivLu().solve(Y * p.dh * e.Z);
  Eigen::EigenSolver<Mat> es(e.E);
  e.eigenvalues = es.eigenvalues();
  e.eigenvectors = es.eigenvectors();
  return e;
}

Mat killing_rows(const Eigen::VectorXcd& ev, const Eigen::MatrixXcd& X, const std::vector<bool>& kill)
{
  Eigen::MatrixXcd Xi = X.inverse();
  std::vector<Vec> rows;
  std::vector<bool> done(ev.size(), false);
  for (int j = 0; j < ev.size(); ++j) {
    if (!kill[j] || done[j]) continue;
    done[j] = true;
    const double scale = 1.0 + std::abs(ev(j));
    if (std::abs(ev(j).imag()) <= 1e-12 * scale) {
      rows.push_back(Xi.row(j).real().transpose());
      continue;
    }
    rows.push_back(Xi.row(j).real().transpose());
    rows.push_back(Xi.row(j).imag().transpose());
    for (int k = j + 1; k < ev.size(); ++k)
      if (!done[k] && std::abs(ev(k) - std::conj(ev(j))) <= 1e-10 * scale) {
        done[k] = true;
        break;
      }
  }
  Mat R(rows.size(), X.rows());
  for (size_t i = 0; i < rows.size(); ++i) R.row(i) = rows[i].transpose();
  return R;
}

NSProfile solve_ns_profile(const ReducedFlux& flux, const ShockSpec& spec, const Vec& phase, const NSOptions& opt)
{
  const int n = flux.dim();
  require(spec.epsilon > 0.0, ErrorKind::config, "degenerate shock: epsilon = 0");
  require(opt.nodes >= 5 && opt.nodes % 2 == 1, ErrorKind::config, "NS profile needs an odd node count >= 5");
  NSProfile p;
  p.u_minus = spec.u_minus;
  p.u_plus = spec.u_plus;
  p.epsilon = spec.epsilon;
  p.phase = phase.normalized();
  split_rows(flux.b(flux.base()), opt.kernel_tol, p.Lk, p.Y);
  const int k = static_cast<int>(p.Lk.rows());

  EndstatePencil pm = reduced_pencil(flux, p.u_minus, p.Lk, p.Y);
  EndstatePencil pp = reduced_pencil(flux, p.u_plus, p.Lk, p.Y);
  const int qm = slow_index(pm.eigenvalues), qp = slow_index(pp.eigenvalues);
  p.mu_minus = pm.eigenvalues(qm).real();
  p.mu_plus = pp.eigenvalues(qp).real();
  std::vector<bool> kill_m(pm.eigenvalues.size()), kill_p(pp.eigenvalues.size());
  for (int j = 0; j < pm.eigenvalues.size(); ++j) kill_m[j] = pm.eigenvalues(j).real() < 0.0;
  for (int j = 0; j < pp.eigenvalues.size(); ++j) kill_p[j] = pp.eigenvalues(j).real() > 0.0;
  Mat Bm = killing_rows(pm.eigenvalues, pm.eigenvectors, kill_m) * pm.Z.transpose();
  Mat Bp = killing_rows(pp.eigenvalues, pp.eigenvectors, kill_p) * pp.Z.transpose();
  const int nb = static_cast<int>(Bm.rows() + Bp.rows());
  if (nb != n - k - 1) {
    std::ostringstream msg;
    msg << "NS boundary-condition count " << nb << " != " << n - k - 1 << " (not a Lax profile)";
    fail(ErrorKind::assumption, msg.str());
  }

  p.theta_hat = 0.5 * std::abs(p.mu_minus);
  require(p.theta_hat > 0.0, ErrorKind::assumption, "slow endstate eigenvalue vanishes");
  p.half_length = opt.half_length > 0.0 ? opt.half_length : 12.0 / p.theta_hat;
  const int N = opt.nodes;
  p.x = Vec::LinSpaced(N, -p.half_length, p.half_length);
  const double h = p.h();
  p.center = (N - 1) / 2 + opt.phase_node_offset;
  require(p.center > 0 && p.center < N - 1, ErrorKind::config, "phase node outside the domain");
  const Vec mid = p.mid();
  const Vec half_jump = 0.5 * (p.u_plus - p.u_minus);
  p.u.resize(N);
  for (int i = 0; i < N; ++i) p.u[i] = mid + half_jump * std::tanh(p.theta_hat * p.x(i));
  const Vec h_minus = flux.h(p.u_minus);
  const int M = N * n;

  auto evaluate = [&](const std::vector<Vec>& u, bool jac, Vec& F, std::vector<Eigen::Triplet<double>>& trip) {
    F.setZero(M);
    trip.clear();
    int row = 0;
    for (int j = 0; j < Bm.rows(); ++j, ++row) {
      F(row) = Bm.row(j).dot(u[0] - p.u_minus);
      if (jac)
        for (int c = 0; c < n; ++c) trip.emplace_back(row, c, Bm(j, c));
    }
    for (int i = 0; i < N; ++i) {
      if (k > 0) {
        FluxPoint fi = flux.point(u[i]);
        F.segment(row, k) = p.Lk * (fi.h - h_minus);
        if (jac) {
          Mat J = p.Lk * fi.dh;
          for (int a = 0; a < k; ++a)
            for (int c = 0; c < n; ++c) trip.emplace_back(row + a, i * n + c, J(a, c));
        }
        row += k;
      }
      if (i == p.center) {
        F(row) = p.phase.dot(u[i] - mid);
        if (jac)
          for (int c = 0; c < n; ++c) trip.emplace_back(row, i * n + c, p.phase(c));
        ++row;
      }
      if (i == N - 1) break;
      Vec m = 0.5 * (u[i] + u[i + 1]);
      Vec du = u[i + 1] - u[i];
      FluxPoint fm = flux.point(m);
      F.segment(row, n - k) = p.Y * (fm.b * du / h - (fm.h - h_minus));
      if (jac) {
        Mat D(n, n);
        const double t = 1e-7 * (1.0 + m.norm());
        Vec bdu = fm.b * du;
        for (int c = 0; c < n; ++c) {
          Vec mc = m;
          mc(c) += t;
          D.col(c) = (flux.b(mc) * du - bdu) / t;
        }
        Mat Jl = p.Y * (-fm.b / h + 0.5 * D / h - 0.5 * fm.dh);
        Mat Jr = p.Y * (fm.b / h + 0.5 * D / h - 0.5 * fm.dh);
        for (int a = 0; a < n - k; ++a)
          for (int c = 0; c < n; ++c) {
            trip.emplace_back(row + a, i * n + c, Jl(a, c));
            trip.emplace_back(row + a, (i + 1) * n + c, Jr(a, c));
          }
      }
      row += n - k;
    }
    for (int j = 0; j < Bp.rows(); ++j, ++row) {
      F(row) = Bp.row(j).dot(u[N - 1] - p.u_plus);
      if (jac)
        for (int c = 0; c < n; ++c) trip.emplace_back(row, (N - 1) * n + c, Bp(j, c));
    }
    require(row == M, ErrorKind::solver, "NS profile system is not square");
  };

  Vec F;
  std::vector<Eigen::Triplet<double>> trip;
  evaluate(p.u, true, F, trip);
  double fnorm = F.lpNorm<Eigen::Infinity>();
  for (int it = 1;; ++it) {
    Eigen::SparseMatrix<double> J(M, M);
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    require(lu.info() == Eigen::Success, ErrorKind::solver, "NS profile Jacobian is singular");
    Vec step = lu.solve(F);
    double lambda = 1.0;
    std::vector<Vec> trial(N);
    Vec Ft;
    std::vector<Eigen::Triplet<double>> none;
    for (int damp = 0;; ++damp) {
      for (int i = 0; i < N; ++i) trial[i] = p.u[i] - lambda * step.segment(i * n, n);
      bool ok = true;
      try {
        evaluate(trial, false, Ft, none);
      } catch (const Error&) {
        ok = false;
      }
      if (ok && Ft.lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * lambda) * fnorm) break;
      if (ok && step.lpNorm<Eigen::Infinity>() <= opt.tol * spec.epsilon) break;
      lambda *= 0.5;
      require(damp < 30, ErrorKind::solver, "NS profile Newton: line search failed");
    }
    p.u = trial;
    p.iterations = it;
    const double snorm = lambda * step.lpNorm<Eigen::Infinity>();
    if (snorm <= opt.tol * spec.epsilon) {
      evaluate(p.u, false, F, trip);
      break;
    }
    require(it < opt.max_iter, ErrorKind::solver, "NS profile Newton did not converge");
    evaluate(p.u, true, F, trip);
    fnorm = F.lpNorm<Eigen::Infinity>();
  }
  p.residual = F.lpNorm<Eigen::Infinity>();
  p.endpoint_gap = std::max((p.u.front() - p.u_minus).norm(), (p.u.back() - p.u_plus).norm());

  p.du.resize(N);
  for (int i = 0; i < N; ++i) {
    FluxPoint fi = flux.point(p.u[i]);
    Mat S(n + k, n);
    Vec rhs = Vec::Zero(n + k);
    S.topRows(n) = fi.b;
    rhs.head(n) = fi.h - h_minus;
    if (k > 0) S.bottomRows(k) = p.Lk * fi.dh;
    p.du[i] = S.colPivHouseholderQr().solve(rhs);
  }
  return p;
}

DecayFit fit_decay(const Vec& x, const std::vector<double>& dist_left, const std::vector<double>& dist_right,
                   double half_length)
{
  auto fit = [&](const std::vector<double>& d, int sign) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i < x.size(); ++i) {
      const double ax = sign * x(i);
      if (ax < 0.2 * half_length || ax > 0.8 * half_length || !(d[i] > 0.0)) continue;
      const double y = std::log(d[i]);
      sx += ax;
      sy += y;
      sxx += ax * ax;
      sxy += ax * y;
      ++cnt;
    }
    require(cnt >= 3, ErrorKind::solver, "decay fit window is empty");
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return -slope;
  };
  DecayFit f;
  f.rate_left = fit(dist_left, -1);
  f.rate_right = fit(dist_right, 1);
  return f;
}

DecayFit fit_profile_decay(const NSProfile& p)
{
  std::vector<double> dl(p.size()), dr(p.size());
  for (int i = 0; i < p.size(); ++i) {
    dl[i] = (p.u[i] - p.u_minus).norm();
    dr[i] = (p.u[i] - p.u_plus).norm();
  }
  return fit_decay(p.x, dl, dr, p.half_length);
}

double max_derivative(const NSProfile& p)
{
  double m = 0.0;
  for (const auto& d : p.du) m = std::max(m, d.norm());
  return m;
}

SlowModeData slow_mode_data(const ReducedFlux& flux, const NSProfile& p)
{
  SlowModeData s;
  s.mu.resize(p.size());
  s.separation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.size(); ++i) {
    EndstatePencil e = reduced_pencil(flux, p.u[i], p.Lk, p.Y);
    const int q = slow_index(e.eigenvalues);
    s.mu(i) = e.eigenvalues(q).real();
    for (int j = 0; j < e.eigenvalues.size(); ++j)
      if (j != q) s.separation = std::min(s.separation, std::abs(e.eigenvalues(j).real()));
  }
  EndstatePencil em = reduced_pencil(flux, p.u_minus, p.Lk, p.Y);
  EndstatePencil ep = reduced_pencil(flux, p.u_plus, p.Lk, p.Y);
  s.mu_minus = em.eigenvalues(slow_index(em.eigenvalues)).real();
  s.mu_plus = ep.eigenvalues(slow_index(ep.eigenvalues)).real();
  std::vector<double> dl(p.size()), dr(p.size());
  for (int i = 0; i < p.size(); ++i) {
    dl[i] = std::abs(s.mu(i) - s.mu_minus);
    dr[i] = std::abs(s.mu(i) - s.mu_plus);
  }
  s.m_decay_rate = fit_decay(p.x, dl, dr, p.half_length).rate();
  return s;
}

std::vector<Vec> ns_v_correction(const ReducedSystem& red, const NSProfile& p, bool include_correction)
{
  std::vector<Vec> v(p.size());
  for (int i = 0; i < p.size(); ++i) {
    CEPoint c = red.at(p.u[i]);
    v[i] = include_correction ? Vec(c.v + c.c * p.du[i]) : c.v;
  }
  return v;
}

std::vector<Vec> shift_profile(const Vec& x, const std::vector<Vec>& u, double x0)
{
  const int N = static_cast<int>(x.size());
  const double h = x(1) - x(0);
  std::vector<Vec> out(N);
  for (int i = 0; i < N; ++i) {
    const double t = (x(i) + x0 - x(0)) / h;
    if (t <= 0.0) {
      out[i] = u.front();
      continue;
    }
    if (t >= N - 1) {
      out[i] = u.back();
      continue;
    }
    const int j = static_cast<int>(std::floor(t));
    const double w = t - j;
    out[i] = (1.0 - w) * u[j] + w * u[j + 1];
  }
  return out;
}

}  // namespace kshock
