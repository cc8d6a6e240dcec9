#include "kshock/relaxation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace kshock {

Vec QuadraticMap::bilinear(const Vec& U, const Vec& V) const
{
  const int m = dim();
  Mat outer = V * U.transpose();
  Eigen::Map<const Vec> flat(outer.data(), m * m);
  return T.transpose() * flat;
}

Vec QuadraticMap::operator()(const Vec& U) const { return bilinear(U, U) + C * U + d; }

Mat QuadraticMap::jacobian(const Vec& U) const
{
  const int m = dim();
  Mat J = C;
  for (int a = 0; a < m; ++a)
    if (U(a) != 0.0) J.noalias() += (2.0 * U(a)) * T.middleRows(a * m, m).transpose();
  return J;
}

Vec RelaxationSystem::join(const Vec& u, const Vec& v) const
{
  Vec U(m());
  U << u, v;
  return U;
}

Vec RelaxationSystem::q(const Vec& u, const Vec& v) const { return Q(join(u, v)).tail(r); }

Mat RelaxationSystem::dq(const Vec& u, const Vec& v) const { return Q.jacobian(join(u, v)).bottomRows(r); }

void RelaxationSystem::check() const
{
  const int M = m();
  require(n > 0 && r > 0, ErrorKind::config, name + ": empty macro or micro block");
  require(A.rows() == M && A.cols() == M, ErrorKind::config, name + ": A has wrong shape");
  require(Q.T.rows() == M * M && Q.T.cols() == M, ErrorKind::config, name + ": collision tensor has wrong shape");
  require(Q.C.rows() == M && Q.C.cols() == M && Q.d.size() == M, ErrorKind::config,
          name + ": affine collision part has wrong shape");
  require(reference.size() == M && metric.rows() == M && metric.cols() == M, ErrorKind::config,
          name + ": reference or metric has wrong shape");
  require(fluid_map.rows() == n && fluid_map.cols() == n, ErrorKind::config, name + ": fluid map has wrong shape");
}

Vec solve_equilibrium(const RelaxationSystem& sys, const Vec& u, const Vec& v0, const NewtonOptions& opt)
{
  Vec v = v0;
  double scale = 1.0 + u.norm() + v0.norm();
  for (int it = 0; it < opt.max_iter; ++it) {
    Vec res = sys.q(u, v);
    if (res.norm() <= opt.tol * scale) return v;
    Mat Jv = sys.dq(u, v).rightCols(sys.r);
    Eigen::PartialPivLU<Mat> lu(Jv);
    Vec dv = lu.solve(res);
    require(dv.allFinite(), ErrorKind::assumption, sys.name + ": singular d_v q in equilibrium solve");
    v -= dv;
    if (dv.norm() <= 1e-3 * opt.tol * scale && sys.q(u, v).norm() <= opt.tol * scale) return v;
  }
  if (sys.q(u, v).norm() <= 10.0 * opt.tol * scale) return v;
  fail(ErrorKind::assumption, sys.name + ": equilibrium Newton did not converge (state outside the domain box)");
}

RelaxationSystem from_galerkin(const GalerkinSystem& g)
{
  const int M = g.size();
  RelaxationSystem s;
  s.name = "boltzmann_galerkin_d" + std::to_string(g.basis.degree());
  s.n = 5;
  s.r = M - 5;
  s.A = g.A;
  s.Q.T = g.T;
  s.Q.C = Mat::Zero(M, M);
  s.Q.d = Vec::Zero(M);
  s.reference = g.reference;
  s.metric = g.W;
  s.fluid_map = g.moment.leftCols(5);
  s.check();
  return s;
}

RelaxationSystem make_jin_xin(double a, double kappa, double gamma)
{
  require(a != 0.0 && kappa > 0.0 && gamma != 0.0, ErrorKind::config, "jin_xin: need a != 0, kappa > 0, gamma != 0");
  RelaxationSystem s;
  s.name = "jin_xin";
  s.n = 1;
  s.r = 1;
  s.A = Mat{{0.0, a}, {a, 0.0}};
  s.Q.T = Mat::Zero(4, 2);
  s.Q.T(0, 1) = 0.5 * kappa * gamma;
  s.Q.C = Mat{{0.0, 0.0}, {0.0, -kappa}};
  s.Q.d = Vec::Zero(2);
  s.reference = Vec::Zero(2);
  s.metric = Mat::Identity(2, 2);
  s.fluid_map = Mat::Identity(1, 1);
  s.check();
  return s;
}

namespace {

struct BroadwellFrame
{
  Vec3 fbar, mu, speed, e;
  Mat O;  // columns: two orthonormal macro directions, then e/|e|
};

BroadwellFrame broadwell_frame(double f_plus, double f_minus)
{
  require(f_plus > 0.0 && f_minus > 0.0, ErrorKind::config, "broadwell: densities must be positive");
  BroadwellFrame fr;
  fr.fbar = Vec3(f_plus, f_minus, std::sqrt(f_plus * f_minus));
  fr.mu = Vec3(1.0, 1.0, 2.0);
  fr.speed = Vec3(1.0, -1.0, 0.0);
  fr.e = Vec3(1.0 / std::sqrt(fr.fbar(0)), 1.0 / std::sqrt(fr.fbar(1)), -std::sqrt(2.0 / fr.fbar(2)));
  // Collision invariants (mass, momentum) in symmetric coordinates, orthonormalized.
  Vec3 mass(std::sqrt(fr.fbar(0)), std::sqrt(fr.fbar(1)), std::sqrt(2.0 * fr.fbar(2)));
  Vec3 mom(std::sqrt(fr.fbar(0)), -std::sqrt(fr.fbar(1)), 0.0);
  Vec3 o1 = mass.normalized();
  Vec3 o2 = (mom - mom.dot(o1) * o1).normalized();
  fr.O = Mat(3, 3);
  fr.O.col(0) = o1;
  fr.O.col(1) = o2;
  fr.O.col(2) = fr.e.normalized();
  return fr;
}

}  // namespace

RelaxationSystem make_broadwell(const BroadwellModel& spec)
{
  BroadwellFrame fr = broadwell_frame(spec.f_plus, spec.f_minus);
  RelaxationSystem s;
  s.name = "broadwell";
  s.n = 2;
  s.r = 1;
  Vec3 shifted = fr.speed.array() - spec.frame_speed;
  s.A = fr.O.transpose() * shifted.asDiagonal() * fr.O;
  // F = D y, y = O U, collision rate F0^2 - F+ F- = F^T S F.
  Vec3 D = (fr.fbar.array() / fr.mu.array()).sqrt();
  Mat S = Mat::Zero(3, 3);
  S(0, 1) = S(1, 0) = -0.5;
  S(2, 2) = 1.0;
  Mat G = fr.O.transpose() * D.asDiagonal() * S * D.asDiagonal() * fr.O;
  const double ne = fr.e.norm();
  s.Q.T = Mat::Zero(9, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s.Q.T(a * 3 + b, 2) = ne * G(a, b);
  s.Q.C = Mat::Zero(3, 3);
  s.Q.d = Vec::Zero(3);
  Vec3 ybar = (fr.mu.array() * fr.fbar.array()).sqrt();
  s.reference = fr.O.transpose() * ybar;
  s.metric = Mat::Identity(3, 3);
  s.fluid_map = Mat::Identity(2, 2);
  s.check();
  return s;
}

Vec3 broadwell_densities(const BroadwellModel& spec, const Vec& U)
{
  BroadwellFrame fr = broadwell_frame(spec.f_plus, spec.f_minus);
  Vec3 y = fr.O * U;
  return ((fr.fbar.array() / fr.mu.array()).sqrt() * y.array()).matrix();
}

double broadwell_sonic_speed(double f_plus, double f_minus)
{
  RelaxationSystem s = make_broadwell({f_plus, f_minus, 0.0});
  Vec u0 = s.reference.head(s.n);
  Vec v0 = s.reference.tail(s.r);
  Mat J = s.dq(u0, v0);
  Mat dv = -J.rightCols(s.r).fullPivLu().solve(J.leftCols(s.n));
  Mat dh = s.A11() + s.A12() * dv;
  Eigen::EigenSolver<Mat> es(dh);
  Vec re = es.eigenvalues().real();
  require(es.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-12, ErrorKind::assumption,
          "broadwell: reduced flux Jacobian is not hyperbolic");
  return re.maxCoeff();
}

NodalRescaling rescale(const QuadratureGrid& grid)
{
  NodalRescaling s;
  const int N = grid.size();
  s.sqrt_weight.resize(N);
  s.A_tilde.resize(N);
  for (int i = 0; i < N; ++i) {
    const double w = japanese(grid.nodes[i]);
    s.sqrt_weight(i) = std::sqrt(w);
    s.A_tilde(i) = grid.nodes[i](0) / w;
  }
  return s;
}

Vec rescaled_q(const CollisionOperator& op, const NodalRescaling& s, const Vec& f_tilde)
{
  Vec f = s.from_tilde(f_tilde);
  return op.q(f, f).cwiseQuotient(s.sqrt_weight);
}

}  // namespace kshock
