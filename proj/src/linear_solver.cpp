#include "kshock/linear_solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace kshock {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, int row, int col, const Mat& B, double scale = 1.0)
{
  for (int j = 0; j < B.cols(); ++j)
    for (int i = 0; i < B.rows(); ++i)
      if (B(i, j) != 0.0) t.emplace_back(row + i, col + j, scale * B(i, j));
}

Mat kernel_basis(const Mat& M)
{
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(M.cols() - M.rows());
}

// Killing rows for eigen-decomposition of E (acting on its coordinates).
Mat mode_rows(const Mat& E, bool kill_stable)
{
  Eigen::EigenSolver<Mat> es(E);
  std::vector<bool> kill(E.rows());
  for (int j = 0; j < E.rows(); ++j)
    kill[j] = kill_stable ? es.eigenvalues()(j).real() < 0.0 : es.eigenvalues()(j).real() > 0.0;
  return killing_rows(es.eigenvalues(), es.eigenvectors(), kill);
}

Profile stack_split(const Vec& X, int N, int m)
{
  Profile U(N);
  for (int i = 0; i < N; ++i) U[i] = X.segment(i * m, m);
  return U;
}

}  // namespace

ApproximateProfile build_approximate(const ReducedSystem& red, const NSProfile& ns, bool correction)
{
  const RelaxationSystem& sys = red.system();
  ApproximateProfile a;
  const int N = ns.size();
  a.x = ns.x;
  a.u = ns.u;
  a.v = ns_v_correction(red, ns, correction);
  a.U.resize(N);
  a.Qlin.resize(N);
  a.M.resize(N);
  a.p.resize(N);
  a.u_minus = ns.u_minus;
  a.u_plus = ns.u_plus;
  a.epsilon = ns.epsilon;
  a.center = ns.center;
  a.h_minus = red.h(ns.u_minus);
  for (int i = 0; i < N; ++i) {
    a.U[i] = sys.join(a.u[i], a.v[i]);
    CEPoint c = red.at(a.u[i]);
    a.Qlin[i] = sys.dq(a.u[i], c.v);
    a.M[i] = sys.dq(a.u[i], a.v[i]) - a.Qlin[i];
    a.p[i] = -c.dv;
    a.row_one_defect =
        std::max(a.row_one_defect, (sys.A11() * a.u[i] + sys.A12() * a.v[i] - a.h_minus).lpNorm<Eigen::Infinity>());
  }
  a.Q_minus = sys.dq(ns.u_minus, red.v_star(ns.u_minus));
  a.Q_plus = sys.dq(ns.u_plus, red.v_star(ns.u_plus));
  const double h = a.h();
  const Mat A2 = sys.A.bottomRows(sys.r);
  a.residual.resize(N - 1);
  Vec qprev = sys.Q(a.U[0]).tail(sys.r);
  for (int i = 0; i + 1 < N; ++i) {
    Vec qnext = sys.Q(a.U[i + 1]).tail(sys.r);
    a.residual[i] = A2 * (a.U[i + 1] - a.U[i]) / h - 0.5 * (qprev + qnext);
    qprev = qnext;
  }
  return a;
}

KineticResidual kinetic_residual(const RelaxationSystem& sys, const Vec& x, const Profile& U, const Vec& flux_constant)
{
  const int N = static_cast<int>(U.size());
  const double h = x(1) - x(0);
  const Mat A1 = sys.A.topRows(sys.n), A2 = sys.A.bottomRows(sys.r);
  KineticResidual k;
  k.per_node = Vec::Zero(N);
  for (int i = 0; i < N; ++i) {
    const double r1 = (A1 * U[i] - flux_constant).norm();
    k.row_one = std::max(k.row_one, r1);
    k.per_node(i) = std::max(k.per_node(i), r1);
  }
  Vec qprev = sys.Q(U[0]).tail(sys.r);
  for (int i = 0; i + 1 < N; ++i) {
    Vec qnext = sys.Q(U[i + 1]).tail(sys.r);
    const double r2 = (A2 * (U[i + 1] - U[i]) / h - 0.5 * (qprev + qnext)).norm();
    k.row_two = std::max(k.row_two, r2);
    k.per_node(i) = std::max(k.per_node(i), r2);
    k.per_node(i + 1) = std::max(k.per_node(i + 1), r2);
    qprev = qnext;
  }
  return k;
}

ProfileOperator::ProfileOperator(const RelaxationSystem& sys, const ApproximateProfile& prof, const Vec& phase)
    : A_(sys.A)
    , N_(prof.size())
    , n_(sys.n)
    , r_(sys.r)
    , m_(sys.m())
    , center_(prof.center)
    , h_(prof.h())
    , phase_(phase.normalized())
    , Qlin_(prof.Qlin)
    , Qm_(prof.Q_minus)
    , Qp_(prof.Q_plus)
{
  Mat Z = kernel_basis(A_.topRows(n_));
  Mat AZ = A_.bottomRows(r_) * Z;
  Eigen::FullPivLU<Mat> lu(AZ);
  require(lu.isInvertible(), ErrorKind::assumption, "A restricted to ker[A11 A12] is singular");
  Bm_ = mode_rows(lu.solve(Qm_ * Z), true) * Z.transpose();
  Bp_ = mode_rows(lu.solve(Qp_ * Z), false) * Z.transpose();
  if (boundary_rows() != r_ - 1) {
    std::ostringstream msg;
    msg << "linearized profile operator: " << boundary_rows() << " boundary conditions, expected " << r_ - 1;
    fail(ErrorKind::assumption, msg.str());
  }
}

Sources ProfileOperator::apply(const Profile& U) const
{
  Sources F;
  F.f.resize(N_);
  F.g.resize(N_ - 1);
  const Mat A1 = A_.topRows(n_), A2 = A_.bottomRows(r_);
  for (int i = 0; i < N_; ++i) F.f[i] = A1 * U[i];
  for (int i = 0; i + 1 < N_; ++i)
    F.g[i] = A2 * (U[i + 1] - U[i]) / h_ - 0.5 * (Qlin_[i] * U[i] + Qlin_[i + 1] * U[i + 1]);
  return F;
}

double ProfileOperator::relative_residual(const Profile& U, const Sources& F) const
{
  Sources G = apply(U);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < N_; ++i) {
    num = std::max(num, (G.f[i] - F.f[i]).lpNorm<Eigen::Infinity>());
    den = std::max(den, F.f[i].lpNorm<Eigen::Infinity>());
  }
  for (int i = 0; i + 1 < N_; ++i) {
    num = std::max(num, (G.g[i] - F.g[i]).lpNorm<Eigen::Infinity>());
    den = std::max(den, F.g[i].lpNorm<Eigen::Infinity>());
  }
  return den > 0.0 ? num / den : num;
}

void ProfileOperator::factor() const
{
  if (lu_) return;
  const int M = N_ * m_;
  Triplets t;
  const Mat A1 = A_.topRows(n_), A2 = A_.bottomRows(r_);
  int row = 0;
  add_block(t, row, 0, Bm_);
  row += static_cast<int>(Bm_.rows());
  for (int i = 0; i < N_; ++i) {
    add_block(t, row, i * m_, A1);
    row += n_;
    if (i == center_) {
      add_block(t, row, i * m_, phase_.transpose());
      ++row;
    }
    if (i + 1 == N_) break;
    add_block(t, row, i * m_, -A2 / h_ - 0.5 * Qlin_[i]);
    add_block(t, row, (i + 1) * m_, A2 / h_ - 0.5 * Qlin_[i + 1]);
    row += r_;
  }
  add_block(t, row, (N_ - 1) * m_, Bp_);
  row += static_cast<int>(Bp_.rows());
  require(row == M, ErrorKind::solver, "bordered system is not square");
  Eigen::SparseMatrix<double> J(M, M);
  J.setFromTriplets(t.begin(), t.end());
  auto lu = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu->compute(J);
  jnorm_ = 0.0;
  for (int k = 0; k < J.outerSize(); ++k) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it) col += std::abs(it.value());
    jnorm_ = std::max(jnorm_, col);
  }
  Vec z = Vec::Ones(M).normalized();
  double growth = 0.0;
  if (lu->info() == Eigen::Success) {
    for (int it = 0; it < 6; ++it) {
      Vec y = lu->solve(z);
      growth = y.norm();
      if (!std::isfinite(growth)) break;
      z = y / growth;
    }
  }
  cond_ = lu->info() == Eigen::Success && std::isfinite(growth) ? growth * jnorm_
                                                                 : std::numeric_limits<double>::infinity();
  if (!(cond_ < 1e13)) {
    std::ostringstream msg;
    msg << "singular bordered system (condition >= " << cond_ << "); near-kernel vector has |J z| = "
        << (lu->info() == Eigen::Success ? (J * z).norm() : std::nan(""))
        << " and phase component " << phase_.dot(z.segment(center_ * m_, n_));
    fail(ErrorKind::solver, msg.str());
  }
  lu_ = lu;
}

double ProfileOperator::condition_estimate() const
{
  factor();
  return cond_;
}

Profile ProfileOperator::solve(const Sources& F) const
{
  factor();
  const int M = N_ * m_;
  Vec b = Vec::Zero(M);
  int row = static_cast<int>(Bm_.rows());
  for (int i = 0; i < N_; ++i) {
    b.segment(row, n_) = F.f[i];
    row += n_;
    if (i == center_) ++row;
    if (i + 1 == N_) break;
    b.segment(row, r_) = F.g[i];
    row += r_;
  }
  Vec X = lu_->solve(b);
  require(X.allFinite(), ErrorKind::solver, "bordered solve produced non-finite values");
  Profile U = stack_split(X, N_, m_);
  // One step of iterative refinement.
  Sources G = apply(U);
  Sources D;
  D.f.resize(N_);
  D.g.resize(N_ - 1);
  for (int i = 0; i < N_; ++i) D.f[i] = F.f[i] - G.f[i];
  for (int i = 0; i + 1 < N_; ++i) D.g[i] = F.g[i] - G.g[i];
  Vec d = Vec::Zero(M);
  row = static_cast<int>(Bm_.rows());
  for (int i = 0; i < N_; ++i) {
    d.segment(row, n_) = D.f[i];
    row += n_;
    if (i == center_) {
      d(row) = -phase_.dot(U[i].head(n_));
      ++row;
    }
    if (i + 1 == N_) break;
    d.segment(row, r_) = D.g[i];
    row += r_;
  }
  d.head(Bm_.rows()) = -Bm_ * U[0];
  d.tail(Bp_.rows()) = -Bp_ * U[N_ - 1];
  Vec dX = lu_->solve(d);
  for (int i = 0; i < N_; ++i) U[i] += dX.segment(i * m_, m_);
  return U;
}

Mat ProfileOperator::end_matrix(double eta, const Mat& Q) const
{
  const Mat A11 = A_.topLeftCorner(n_, n_), A12 = A_.topRightCorner(n_, r_);
  const Mat A21 = A_.bottomLeftCorner(r_, n_), A22 = A_.bottomRightCorner(r_, r_);
  const Mat Q21 = Q.leftCols(n_), Q22 = Q.rightCols(r_);
  const int d = n_ + 2 * r_;
  Mat AA = Mat::Zero(d, d);
  AA.block(0, 0, n_, n_) = A11 / eta;
  AA.block(0, n_, n_, r_) = A12 / eta;
  AA.block(n_, n_ + r_, r_, r_) = Mat::Identity(r_, r_);
  AA.block(n_ + r_, 0, r_, n_) = (A21 * A11 / eta - Q21) / eta;
  AA.block(n_ + r_, n_, r_, r_) = (A21 * A12 / eta - Q22) / eta;
  AA.block(n_ + r_, n_ + r_, r_, r_) = A22 / eta;
  return AA;
}

Profile ProfileOperator::solve_viscous(const Sources& F, double eta) const
{
  require(eta > 0.0, ErrorKind::config, "viscosity must be positive");
  const int M = N_ * m_;
  const Mat A1 = A_.topRows(n_), A2 = A_.bottomRows(r_);
  const Mat In = Mat::Identity(n_, n_), Ir = Mat::Identity(r_, r_);
  Triplets t;
  Vec b = Vec::Zero(M);
  int row = 0;
  add_block(t, row, 0, Bm_);
  row += static_cast<int>(Bm_.rows());
  const double c = eta / (2.0 * h_);
  for (int i = 0; i < N_; ++i) {
    // A11 u + A12 v - eta u' = f at nodes, second-order differences.
    add_block(t, row, i * m_, A1);
    if (i == 0) {
      add_block(t, row, 0, 3.0 * c * In);
      add_block(t, row, m_, -4.0 * c * In);
      add_block(t, row, 2 * m_, c * In);
    } else if (i + 1 == N_) {
      add_block(t, row, i * m_, -3.0 * c * In);
      add_block(t, row, (i - 1) * m_, 4.0 * c * In);
      add_block(t, row, (i - 2) * m_, -c * In);
    } else {
      add_block(t, row, (i + 1) * m_, -c * In);
      add_block(t, row, (i - 1) * m_, c * In);
    }
    b.segment(row, n_) = F.f[i];
    row += n_;
    if (i == center_) {
      add_block(t, row, i * m_, phase_.transpose());
      ++row;
    }
    if (i + 1 == N_) break;
    // Box row two minus eta v'' at the midpoint.
    add_block(t, row, i * m_, -A2 / h_ - 0.5 * Qlin_[i]);
    add_block(t, row, (i + 1) * m_, A2 / h_ - 0.5 * Qlin_[i + 1]);
    const double e2 = eta / (h_ * h_);
    if (i == 0 || i + 2 == N_) {
      const int k = i == 0 ? 1 : N_ - 2;
      add_block(t, row, (k - 1) * m_ + n_, -e2 * Ir);
      add_block(t, row, k * m_ + n_, 2.0 * e2 * Ir);
      add_block(t, row, (k + 1) * m_ + n_, -e2 * Ir);
    } else {
      add_block(t, row, (i - 1) * m_ + n_, -0.5 * e2 * Ir);
      add_block(t, row, i * m_ + n_, 0.5 * e2 * Ir);
      add_block(t, row, (i + 1) * m_ + n_, 0.5 * e2 * Ir);
      add_block(t, row, (i + 2) * m_ + n_, -0.5 * e2 * Ir);
    }
    b.segment(row, r_) = F.g[i];
    row += r_;
  }
  add_block(t, row, (N_ - 1) * m_, Bp_);
  row += static_cast<int>(Bp_.rows());
  require(row == M, ErrorKind::solver, "viscous system is not square");
  Eigen::SparseMatrix<double> J(M, M);
  J.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(J);
  require(lu.info() == Eigen::Success, ErrorKind::solver, "viscous system is singular");
  Vec X = lu.solve(b);
  Vec R = b - J * X;
  X += lu.solve(R);
  return stack_split(X, N_, m_);
}

Profile ProfileOperator::solve_viscous_first_order(const Sources& F, double eta) const
{
  require(eta > 0.0, ErrorKind::config, "viscosity must be positive");
  const int d = n_ + 2 * r_;
  const int M = N_ * d;
  const Mat A11 = A_.topLeftCorner(n_, n_), A12 = A_.topRightCorner(n_, r_);
  const Mat A21 = A_.bottomLeftCorner(r_, n_), A22 = A_.bottomRightCorner(r_, r_);
  Mat Bm = mode_rows(end_matrix(eta, Qm_), true);
  Mat Bp = mode_rows(end_matrix(eta, Qp_), false);
  if (Bm.rows() + Bp.rows() != d - 1) {
    std::ostringstream msg;
    msg << "viscous system: " << Bm.rows() + Bp.rows() << " boundary conditions, expected " << d - 1;
    fail(ErrorKind::assumption, msg.str());
  }
  // Unknown layout per node: u (n), v (r), w (r).
  Triplets t;
  Vec b = Vec::Zero(M);
  int row = 0;
  add_block(t, row, 0, Bm);
  row += static_cast<int>(Bm.rows());
  const Mat Ir = Mat::Identity(r_, r_), In = Mat::Identity(n_, n_);
  for (int i = 0; i < N_; ++i) {
    if (i == center_) {
      add_block(t, row, i * d, phase_.transpose());
      ++row;
    }
    if (i + 1 == N_) break;
    const int c0 = i * d, c1 = (i + 1) * d;
    // eta u' = A11 u + A12 v - f
    add_block(t, row, c0, -eta / h_ * In - 0.5 * A11);
    add_block(t, row, c1, eta / h_ * In - 0.5 * A11);
    add_block(t, row, c0 + n_, -0.5 * A12);
    add_block(t, row, c1 + n_, -0.5 * A12);
    b.segment(row, n_) = -0.5 * (F.f[i] + F.f[i + 1]);
    row += n_;
    // v' = w
    add_block(t, row, c0 + n_, -Ir / h_);
    add_block(t, row, c1 + n_, Ir / h_);
    add_block(t, row, c0 + n_ + r_, -0.5 * Ir);
    add_block(t, row, c1 + n_ + r_, -0.5 * Ir);
    row += r_;
    // eta w' - A21 u' - A22 w + Q U = -g
    add_block(t, row, c0, A21 / h_ + 0.5 * Qlin_[i].leftCols(n_));
    add_block(t, row, c1, -A21 / h_ + 0.5 * Qlin_[i + 1].leftCols(n_));
    add_block(t, row, c0 + n_, 0.5 * Qlin_[i].rightCols(r_));
    add_block(t, row, c1 + n_, 0.5 * Qlin_[i + 1].rightCols(r_));
    add_block(t, row, c0 + n_ + r_, -eta / h_ * Ir - 0.5 * A22);
    add_block(t, row, c1 + n_ + r_, eta / h_ * Ir - 0.5 * A22);
    b.segment(row, r_) = -F.g[i];
    row += r_;
  }
  add_block(t, row, (N_ - 1) * d, Bp);
  row += static_cast<int>(Bp.rows());
  require(row == M, ErrorKind::solver, "viscous system is not square");
  Eigen::SparseMatrix<double> J(M, M);
  J.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(J);
  require(lu.info() == Eigen::Success, ErrorKind::solver, "viscous system is singular");
  Vec X = lu.solve(b);
  Vec R = b - J * X;
  X += lu.solve(R);
  Profile U(N_);
  for (int i = 0; i < N_; ++i) U[i] = X.segment(i * d, m_);
  return U;
}

Profile ProfileOperator::solve_viscous_limit(const Sources& F, const std::vector<double>& etas, bool first_order) const
{
  const int K = static_cast<int>(etas.size());
  Profile out(N_, Vec::Zero(m_));
  for (int k = 0; k < K; ++k) {
    double w = 1.0;
    for (int j = 0; j < K; ++j)
      if (j != k) w *= etas[j] / (etas[j] - etas[k]);
    Profile U = first_order ? solve_viscous_first_order(F, etas[k]) : solve_viscous(F, etas[k]);
    for (int i = 0; i < N_; ++i) out[i] += w * U[i];
  }
  return out;
}

EndstateReport ProfileOperator::endstate_spectrum(double eta, const Mat& dh_minus, const Mat& dh_plus) const
{
  EndstateReport rep;
  rep.eta = eta;
  rep.eig_minus = Eigen::EigenSolver<Mat>(end_matrix(eta, Qm_), false).eigenvalues();
  rep.eig_plus = Eigen::EigenSolver<Mat>(end_matrix(eta, Qp_), false).eigenvalues();
  auto count = [](const Eigen::VectorXcd& ev, int& s, int& u) {
    s = u = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i).real() < 0.0) ++s;
      if (ev(i).real() > 0.0) ++u;
    }
  };
  count(rep.eig_minus, rep.stable_minus, rep.unstable_minus);
  count(rep.eig_plus, rep.stable_plus, rep.unstable_plus);
  int sm, um, sp, up;
  count(Eigen::EigenSolver<Mat>(dh_minus, false).eigenvalues(), sm, um);
  count(Eigen::EigenSolver<Mat>(dh_plus, false).eigenvalues(), sp, up);
  const int d = n_ + 2 * r_;
  rep.expected_stable_minus = r_ + sm;
  rep.expected_stable_plus = r_ + sp;
  rep.expected_unstable_minus = d - rep.expected_stable_minus;
  rep.expected_unstable_plus = d - rep.expected_stable_plus;
  rep.dims_ok = rep.stable_minus == rep.expected_stable_minus && rep.stable_plus == rep.expected_stable_plus &&
                rep.unstable_minus == rep.expected_unstable_minus && rep.unstable_plus == rep.expected_unstable_plus;
  rep.balance_ok = rep.stable_plus + rep.unstable_minus == 2 * r_ + n_ + 1;
  rep.min_abs_re = std::numeric_limits<double>::infinity();
  for (const auto* ev : {&rep.eig_minus, &rep.eig_plus})
    for (int i = 0; i < ev->size(); ++i) rep.min_abs_re = std::min(rep.min_abs_re, std::abs((*ev)(i).real()));
  auto slow = [](const Eigen::VectorXcd& ev) {
    int k = 0;
    for (int i = 1; i < ev.size(); ++i)
      if (std::abs(ev(i)) < std::abs(ev(k))) k = i;
    return ev(k);
  };
  rep.slow_minus = slow(rep.eig_minus);
  rep.slow_plus = slow(rep.eig_plus);
  return rep;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> ProfileOperator::pencil_spectrum() const
{
  Mat Z = kernel_basis(A_.topRows(n_));
  Eigen::FullPivLU<Mat> lu(A_.bottomRows(r_) * Z);
  return {Eigen::EigenSolver<Mat>(lu.solve(Qm_ * Z), false).eigenvalues(),
          Eigen::EigenSolver<Mat>(lu.solve(Qp_ * Z), false).eigenvalues()};
}

double weighted_norm(const Vec& x, const Profile& f, int k, double eps, double delta, const Mat* G)
{
  const double h = x(1) - x(0);
  std::vector<double> pos(f.size());
  const bool nodal = static_cast<int>(f.size()) == x.size();
  for (size_t i = 0; i < f.size(); ++i) pos[i] = nodal ? x(i) : 0.5 * (x(i) + x(i + 1));
  Profile cur = f;
  double total = 0.0;
  for (int j = 0; j <= k; ++j) {
    double s = 0.0;
    for (size_t i = 0; i < cur.size(); ++i) {
      const double w = std::exp(delta * eps * std::sqrt(1.0 + pos[i] * pos[i]));
      const double v2 = G ? cur[i].dot(*G * cur[i]) : cur[i].squaredNorm();
      s += h * w * w * v2;
    }
    total += std::pow(eps, 0.5 - j) * std::sqrt(s);
    if (j == k) break;
    Profile next(cur.size() - 1);
    std::vector<double> npos(cur.size() - 1);
    for (size_t i = 0; i + 1 < cur.size(); ++i) {
      next[i] = (cur[i + 1] - cur[i]) / h;
      npos[i] = 0.5 * (pos[i] + pos[i + 1]);
    }
    cur.swap(next);
    pos.swap(npos);
  }
  return total;
}

Vec choose_phase_vector(const SlowField& slow) { return slow.l.normalized(); }

Sources random_sources(const Vec& x, int n, int r, double eps, unsigned seed, bool with_f)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> uw(0.5, 2.0), uc(-2.0, 2.0);
  struct Bump
  {
    Vec a;
    double w, c;
  };
  auto bumps = [&](int dim) {
    std::vector<Bump> b(3);
    for (auto& bb : b) {
      bb.a = Vec(dim);
      for (int i = 0; i < dim; ++i) bb.a(i) = g(rng);
      bb.w = uw(rng);
      bb.c = uc(rng);
    }
    return b;
  };
  auto eval = [&](const std::vector<Bump>& b, double xx, int dim) {
    Vec v = Vec::Zero(dim);
    for (const auto& bb : b) {
      const double s = 1.0 / std::cosh(eps * xx / bb.w - bb.c);
      v += bb.a * s * s;
    }
    return v;
  };
  auto bf = bumps(n);
  auto bg = bumps(r);
  const int N = static_cast<int>(x.size());
  Sources F;
  F.f.resize(N);
  F.g.resize(N - 1);
  for (int i = 0; i < N; ++i) F.f[i] = with_f ? eval(bf, x(i), n) : Vec::Zero(n);
  for (int i = 0; i + 1 < N; ++i) F.g[i] = eval(bg, 0.5 * (x(i) + x(i + 1)), r);
  return F;
}

EstimateSample estimate_sample(const ProfileOperator& op, const ApproximateProfile& prof, const Sources& F,
                               double delta, const Mat* G)
{
  const double eps = prof.epsilon;
  const int N = prof.size();
  Profile U = op.solve(F);
  const int n = static_cast<int>(F.f[0].size());
  const int m = static_cast<int>(U[0].size());
  EstimateSample s;
  s.epsilon = eps;
  s.residual = op.relative_residual(U, F);
  s.phase = std::abs(op.phase().dot(U[prof.center].head(n)));
  const double nf3 = weighted_norm(prof.x, F.f, 3, eps, delta);
  const double ng2 = weighted_norm(prof.x, F.g, 2, eps, delta);
  const double nU2 = weighted_norm(prof.x, U, 2, eps, delta, G);
  s.c_h2 = (nf3 + ng2) > 0.0 ? eps * nU2 / (nf3 + ng2) : 0.0;
  Profile u(N), vt(N), dU(N - 1);
  for (int i = 0; i < N; ++i) {
    u[i] = U[i].head(n);
    vt[i] = U[i].tail(m - n) + prof.p[i] * u[i];
  }
  for (int i = 0; i + 1 < N; ++i) dU[i] = (U[i + 1] - U[i]) / prof.h();
  auto l2 = [&](const Profile& f) { return weighted_norm(prof.x, f, 0, eps, delta); };
  // ||(f, f', f'', g, g')||: the eps-free derivative norms of the sources.
  auto deriv_l2 = [&](const Profile& f, int k) {
    Profile cur = f;
    double total = l2(cur);
    for (int j = 1; j <= k; ++j) {
      Profile next(cur.size() - 1);
      for (size_t i = 0; i + 1 < cur.size(); ++i) next[i] = (cur[i + 1] - cur[i]) / prof.h();
      cur.swap(next);
      Vec xx = prof.x.head(cur.size() + 1);
      total += weighted_norm(xx, cur, 0, eps, delta);
    }
    return total;
  };
  const double lhs = l2(dU) + l2(vt);
  const double nu = l2(u);
  const double rhs = deriv_l2(F.f, 2) + deriv_l2(F.g, 1) + eps * nu;
  s.c_l2 = rhs > 0.0 ? lhs / rhs : 0.0;
  s.vtilde_ratio = nu > 0.0 ? l2(vt) / (eps * nu) : 0.0;
  return s;
}

}  // namespace kshock
