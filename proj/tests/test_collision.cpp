#include "kshock/collision.hpp"

#include <doctest.h>

#include <random>

using namespace kshock;

namespace {

FluidState unit_state() { return FluidState::from_primitive(1.0, Vec3::Zero(), 0.75); }

// 2 pi int |xi - eta| M(eta) d eta for a Maxwellian of temperature T.
double nu_closed_form(double rho, double T, double dist)
{
  double s = std::sqrt(T);
  double a = dist / s;
  if (a < 1e-8) return 2 * pi * rho * s * 2.0 * std::sqrt(2.0 / pi);
  return 2 * pi * rho * s * (std::sqrt(2.0 / pi) * std::exp(-0.5 * a * a) + (a + 1.0 / a) * std::erf(a / std::sqrt(2.0)));
}

Vec random_perturbation(const VelocitySpace& space, std::mt19937& rng)
{
  std::normal_distribution<double> nd;
  const Vec& m = space.reference_maxwellian();
  Vec f(m.size());
  double c[6];
  for (double& x : c) x = nd(rng);
  for (int i = 0; i < m.size(); ++i) {
    const Vec3& x = space.grid().nodes[i];
    f(i) = m(i) * (c[0] + c[1] * x(0) + c[2] * x(1) * x(2) + c[3] * x.squaredNorm() + c[4] * x(0) * x(0) * x(0) + 0.1 * c[5] * nd(rng));
  }
  return f;
}

}  // namespace

TEST_CASE("collision geometry conserves momentum and energy")
{
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 10000; ++k) {
    Vec3 a(nd(rng), nd(rng), nd(rng)), b(nd(rng), nd(rng), nd(rng)), o(nd(rng), nd(rng), nd(rng));
    o.normalize();
    CollisionGeometry c = collide(a, b, o);
    CHECK((c.xi + c.xi_star - c.xi_prime - c.xi_star_prime).norm() < 1e-12);
    CHECK(std::abs(c.xi.squaredNorm() + c.xi_star.squaredNorm() - c.xi_prime.squaredNorm() - c.xi_star_prime.squaredNorm()) < 1e-12);
  }
}

TEST_CASE("sigma representation identity for the hard-sphere kernel")
{
  // int |Omega.g| F(xi') dOmega = (|g|/2) int F(G + |g| sigma/2) dsigma for F = first coordinate squared.
  Vec3 xi(0.3, -0.2, 0.5), xs(-0.4, 0.6, 0.1);
  SphereRule fine = sphere_product_rule(64, 128);
  double lhs = 0.0, rhs = 0.0;
  Vec3 g = xi - xs, G = 0.5 * (xi + xs);
  for (size_t k = 0; k < fine.nodes.size(); ++k) {
    CollisionGeometry c = collide(xi, xs, fine.nodes[k]);
    lhs += fine.w[k] * std::abs(fine.nodes[k].dot(g)) * c.xi_prime(0) * c.xi_prime(0);
    Vec3 p = G + 0.5 * g.norm() * fine.nodes[k];
    rhs += fine.w[k] * 0.5 * g.norm() * p(0) * p(0);
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
}

TEST_CASE("nu of a Maxwellian")
{
  FluidState u = unit_state();
  VelocitySpace space(build_grid(12, 5.0, 4), u);
  CollisionOperator op(space);
  Vec m = space.reference_maxwellian();
  CHECK(op.nu(Vec::Zero(m.size())).norm() == 0.0);
  Vec nu = op.nu(m);
  const auto& g = space.grid();
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    CHECK(nu(i) > 0.0);
    double r = nu(i) / japanese(g.nodes[i]);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    CHECK(nu(i) == doctest::Approx(nu_closed_form(1.0, 0.5, g.nodes[i].norm())).epsilon(5e-3));
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 10.0);
  // Brute-force oracle at the origin: the same sum at double resolution.
  VelocitySpace fine(build_grid(24, 5.0, 4), u);
  CollisionOperator opf(fine);
  Vec nuf = opf.nu(fine.reference_maxwellian());
  double at0 = 0.0;
  for (int i = 0; i < fine.grid().size(); ++i) at0 += fine.grid().weights(i) * fine.reference_maxwellian()(i) * 2 * pi * fine.grid().nodes[i].norm();
  CHECK(at0 == doctest::Approx(nu_closed_form(1.0, 0.5, 0.0)).epsilon(1e-4));
  (void)nuf;
}

TEST_CASE("nodal Q: bilinearity, conservation, equilibrium")
{
  FluidState u = unit_state();
  VelocitySpace space(build_grid(8, 5.0, 4), u);
  CollisionOperator op(space);
  std::mt19937 rng(5);
  Vec f = random_perturbation(space, rng);
  Vec h = random_perturbation(space, rng);
  CHECK(op.q_gain(Vec::Zero(f.size()), h).norm() == 0.0);
  Vec q1 = op.q(f, h);
  CHECK((op.q(2.5 * f, h) - 2.5 * q1).norm() <= 1e-12 * q1.norm());
  Vec sym1 = op.q(f, h) + op.q(h, f);
  Vec sym2 = op.q(h, f) + op.q(f, h);
  CHECK((sym1 - sym2).norm() == 0.0);
  Vec5 mom = moments(op.q(f, f), space.grid());
  double nf = space.weighted_norm(f, 0.5);
  CHECK(mom.norm() <= 1e-12 * nf * nf);
  // Raw discretization defect is bounded but not zero.
  Vec5 raw = moments(op.q_raw(f, f), space.grid());
  CHECK(std::isfinite(raw.norm()));
}

TEST_CASE("linearization matches the quadratic expansion of Q")
{
  FluidState u = unit_state();
  VelocitySpace space(build_grid(8, 5.0, 4), u);
  CollisionOperator op(space);
  Vec a = space.reference_maxwellian();
  LinearizedOperator L = linearize(op, a);
  std::mt19937 rng(9);
  Vec h = random_perturbation(space, rng);
  const double t = 1e-4;
  Vec fd = (op.q(a + t * h, a + t * h) - op.q(a, a)) / t - t * op.q(h, h);
  Vec lh = L.matrix * h;
  CHECK((fd - lh).norm() <= 1e-6 * lh.norm());
  Mat Lm = L.compact_part;
  Lm.diagonal() -= L.multiplicative_part;
  CHECK((Lm - L.matrix).norm() <= 1e-14 * L.matrix.norm());
}

TEST_CASE("nodal linearized operator: approximate kernel and symmetry trend")
{
  FluidState u = unit_state();
  auto defect = [&](int n) {
    VelocitySpace space(build_grid(n, 5.0, 4), u);
    CollisionOperator op(space);
    LinearizedOperator L = linearize(op, space.reference_maxwellian());
    const auto& g = space.grid();
    const Vec& m = space.reference_maxwellian();
    double worst = 0.0;
    for (int j = 0; j < 5; ++j) {
      Vec phi(g.size());
      for (int i = 0; i < g.size(); ++i) phi(i) = psi(g.nodes[i])(j) * m(i);
      worst = std::max(worst, space.weighted_norm(L.matrix * phi, 0.5) / (L.matrix.norm() * space.weighted_norm(phi, 0.5)));
    }
    return std::pair{worst, symmetry_defect(space, L.matrix)};
  };
  auto [k8, s8] = defect(8);
  CHECK(k8 < 0.05);
  CHECK(std::isfinite(s8));
  MESSAGE("nodal L at n=8: kernel defect " << k8 << ", symmetry defect " << s8);
}

TEST_CASE("operator norm report is finite")
{
  FluidState u = unit_state();
  VelocitySpace space(build_grid(8, 5.0, 4), u);
  CollisionOperator op(space);
  auto rows = operator_norm_report(op, 0.5, 0.75);
  REQUIRE(rows.size() == 3);
  for (auto& r : rows) {
    CHECK(std::isfinite(r.value));
    CHECK(r.value > 0.0);
  }
  CHECK(weighted_operator_norm(Mat::Zero(4, 4), Vec::Ones(4), Vec::Ones(4)) == 0.0);
  CHECK_THROWS_AS(operator_norm_report(op, 0.8, 0.75), Error);
}
