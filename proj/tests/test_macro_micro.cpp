#include "kshock/macro_micro.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kshock;
using namespace kshock::testing;

namespace {

FluidState sonic_reference() { return FluidState::from_primitive(1.0, Vec3(std::sqrt(5.0 / 6.0), 0.0, 0.0), 0.75); }

const GalerkinSystem& galerkin4()
{
  static GalerkinSystem g = build_galerkin(4, sonic_reference());
  return g;
}

const VelocitySpace& space8()
{
  static VelocitySpace s(build_grid(8, 5.0, 4), FluidState::from_primitive(1.0, Vec3(0.3, 0.0, 0.0), 0.75));
  return s;
}

}  // namespace

TEST_CASE("equilibrium basis: chi_0 = 1, five directions, quadrature-orthogonal")
{
  VelocitySpace space(build_grid(16, 6.0, 4), sonic_reference());
  EquilibriumBasis b = build_basis(space);
  const Vec& M = space.reference_maxwellian();
  CHECK((b.phi_raw.col(0) - M).norm() == 0.0);
  CHECK(b.off_diagonal() <= 1e-6);
  Eigen::JacobiSVD<Mat> svd(b.phi_raw);
  CHECK(svd.singularValues()(4) > 1e-3 * svd.singularValues()(0));
  const Vec w = space.weight(0.5);
  CHECK((b.phi.transpose() * w.asDiagonal() * b.phi - Mat::Identity(5, 5)).norm() <= 1e-12);
  // The touch-up only removes quadrature error.
  for (int j = 0; j < 5; ++j) {
    const double scale = std::sqrt(b.gram(j, j));
    CHECK((b.phi.col(j) * scale - b.phi_raw.col(j)).lpNorm<Eigen::Infinity>() <= 1e-5 * M.maxCoeff());
  }
}

TEST_CASE("projectors: complementary, idempotent, self-adjoint, conservative")
{
  const VelocitySpace& space = space8();
  EquilibriumBasis b = build_basis(space);
  Projectors P(space, b);
  const Mat PU = P.macro_matrix(), PV = P.micro_matrix();
  const int N = space.grid().size();
  const Vec w = space.weight(0.5);
  CHECK((PU + PV - Mat::Identity(N, N)).norm() == 0.0);
  CHECK((PU * PU - PU).norm() <= 1e-12 * PU.norm());
  const Mat DPU = w.asDiagonal() * PU;
  CHECK((DPU - DPU.transpose()).norm() <= 1e-12 * DPU.norm());
  Eigen::JacobiSVD<Mat> svd(PU);
  CHECK(svd.singularValues()(4) > 0.1);
  CHECK(svd.singularValues()(5) <= 1e-10);
  CHECK(P.rank() == 5);

  const Vec phi2 = b.phi_raw.col(2);
  CHECK((P.macro(phi2) - phi2).norm() <= 1e-13 * phi2.norm());
  CHECK(P.micro(phi2).norm() <= 1e-13 * phi2.norm());

  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 5; ++t) {
    Vec f(N);
    for (int i = 0; i < N; ++i) f(i) = g(rng) * space.reference_maxwellian()(i);
    CHECK(moments(P.micro(f), space.grid()).norm() <= 1e-13 * moments(f.cwiseAbs(), space.grid()).norm());
  }
  // Least-squares oracle for a Maxwellian away from the reference.
  FluidState u = FluidState::from_primitive(1.1, Vec3(0.4, 0.05, 0.0), 0.8);
  Vec Mu = maxwellian(u, space.grid());
  Vec c = b.gram.ldlt().solve(b.phi_raw.transpose() * w.cwiseProduct(Mu));
  CHECK((P.macro(Mu) - b.phi_raw * c).norm() <= 1e-12 * Mu.norm());
}

TEST_CASE("coercivity of the linearized operator on the micro space")
{
  const GalerkinSystem& g = galerkin4();
  const Mat L = g.dq(g.reference);
  const FormSpace X = galerkin_space(g, 0.5, 0.0);
  CoercivityReport half = coercivity_gap(L, X);
  CHECK(half.delta > 0.0);
  CHECK(half.kernel_quotient <= 1e-12);
  CHECK(half.minimizer.head(5).norm() <= 1e-12);
  // Rayleigh quotient at the minimizer reproduces delta.
  const Vec& f = half.minimizer;
  CHECK(-f.dot(X.gram * L * f) / f.dot(X.metric * f) == doctest::Approx(half.delta).epsilon(1e-10));

  for (double s : {0.6, 0.75, 0.9}) {
    LambdaRule rule = lambda_rule(g, s);
    CHECK(rule.delta0 == doctest::Approx(half.delta).epsilon(1e-12));
    CHECK(rule.delta1 > 0.0);
    CoercivityReport rep = weighted_coercivity(g, s);
    CHECK(rep.delta > 0.0);
    CHECK(rep.lambda == rule.lambda);
    // The selected lambda satisfies the pointwise inequality it was chosen from.
    const FluidState& ref = g.basis.reference();
    std::mt19937 rng(static_cast<unsigned>(100 * s));
    std::uniform_real_distribution<double> U(-6.0, 6.0);
    for (int t = 0; t < 200; ++t) {
      Vec3 xi(U(rng), U(rng), U(rng));
      const double M = maxwellian_at(ref, xi), j = japanese(xi);
      const double lhs = rule.C * std::pow(M, -2.0 * s);
      const double rhs = 0.5 * j * (rule.delta1 * std::pow(M, -2.0 * s) + rule.lambda * rule.delta0 / M);
      CHECK(lhs <= rhs * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("nodal form space: quotient bounds for L = -P_V")
{
  const VelocitySpace& space = space8();
  EquilibriumBasis b = build_basis(space);
  Projectors P(space, b);
  FormSpace X = nodal_space(space, b, 0.5, 0.0);
  CHECK(X.micro.cols() == space.grid().size() - 5);
  CHECK((X.macro.transpose() * X.gram * X.micro).norm() <= 1e-12);
  // On V the quotient is |f|^2 / |<xi>^{1/2} f|^2, bounded by the extreme values of 1/<xi>.
  double jmin = 1e300, jmax = 0.0;
  for (const Vec3& xi : space.grid().nodes) {
    jmin = std::min(jmin, japanese(xi));
    jmax = std::max(jmax, japanese(xi));
  }
  CoercivityReport rep = coercivity_gap(-P.micro_matrix(), X);
  CHECK(rep.delta >= (1.0 - 1e-10) / jmax);
  CHECK(rep.delta <= 1.0 / jmin);
  CHECK(rep.kernel_quotient <= 1e-12);
}

TEST_CASE("hard-sphere collision frequency: closed form against quadrature")
{
  VelocitySpace space(build_grid(16, 6.0, 4), sonic_reference());
  const QuadratureGrid& grid = space.grid();
  const Vec& M = space.reference_maxwellian();
  // |xi - eta| has a kink at eta = xi, so tensor quadrature is only accurate to ~1e-4 here.
  for (const Vec3& xi : {Vec3(0.0, 0.0, 0.0), Vec3(1.0, -0.5, 0.2), Vec3(3.0, 2.0, 0.0)}) {
    double q = 0.0;
    for (int k = 0; k < grid.size(); ++k) q += grid.weights(k) * (xi - grid.nodes[k]).norm() * M(k);
    CHECK(collision_frequency(space.reference(), xi) == doctest::Approx(2.0 * pi * q).epsilon(1e-3));
  }
  // Exact limits: mean of the chi distribution at the bulk velocity, a + T/a far away.
  const FluidState& ref = space.reference();
  const double T = ref.temperature();
  CHECK(collision_frequency(ref, ref.velocity()) == doctest::Approx(4.0 * pi * std::sqrt(2.0 * T / pi)).epsilon(1e-14));
  const double a = 40.0;
  CHECK(collision_frequency(ref, ref.velocity() + Vec3(0.0, a, 0.0)) == doctest::Approx(2.0 * pi * (a + T / a)).epsilon(1e-12));
}

TEST_CASE("Kawashima compensator: skew blocks, closed-form macro block, positivity")
{
  const GalerkinSystem& g = galerkin4();
  const Mat L = g.dq(g.reference);
  Compensator c = build_compensator(g.A, L, g.W, 5);
  CHECK(c.coupling > 0.1);
  const Mat K = c.K();
  CHECK((K + K.transpose()).norm() <= 1e-14 * K.norm());
  CHECK((c.K11 + c.K11.transpose()).norm() == 0.0);
  Eigen::JacobiSVD<Mat> svd(K);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()(i) > 1e-12 * svd.singularValues()(0);
  CHECK(rank <= 10);

  // Direct 5 x 5 arithmetic: in A11's eigenbasis the macro block is the
  // cluster-diagonal part of A21^T A21.
  Eigen::SelfAdjointEigenSolver<Mat> es(g.A.topLeftCorner(5, 5));
  const Mat R = es.eigenvectors();
  const Mat A21 = g.A.bottomLeftCorner(g.size() - 5, 5);
  Mat B = R.transpose() * A21.transpose() * A21 * R;
  const Vec lam = es.eigenvalues();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (std::abs(lam(i) - lam(j)) > 1e-8 * lam.cwiseAbs().maxCoeff()) B(i, j) = 0.0;
  CHECK((R.transpose() * macro_block(c, g.A) * R - B).norm() <= 1e-12 * B.norm());
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(B).eigenvalues()(0) > 0.0);

  CHECK(c.gamma > 0.0);
  CHECK(c.theta > 0.0);
  CHECK(c.theta <= 1.0);
  CHECK(kawashima_gamma(c, g.A, L, g.W, 0.0) <= 1e-12);
  double gmax = 0.0;
  for (auto [theta, gamma] : c.sweep) gmax = std::max(gmax, gamma);
  CHECK(c.gamma >= 0.5 * gmax - 1e-14);
}

TEST_CASE("compensator on the synthetic models and a coupling failure")
{
  for (auto sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    Compensator c = build_compensator(sys);
    CHECK(c.gamma > 0.0);
  }
  // A11 = diag(1, 2) with A21 = (1, 0): the second macro direction is uncoupled.
  Mat A = Mat::Zero(3, 3);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  A(2, 0) = A(0, 2) = 1.0;
  Mat L = Mat::Zero(3, 3);
  L(2, 2) = -1.0;
  bool named = false;
  try {
    build_compensator(A, L, Mat::Identity(3, 3), 2);
  } catch (const Error& e) {
    named = e.kind() == ErrorKind::assumption && std::string(e.what()).find("eigenvalue 2") != std::string::npos;
  }
  CHECK(named);
}
