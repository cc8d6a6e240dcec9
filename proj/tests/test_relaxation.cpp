#include "kshock/reduced.hpp"
#include "kshock/relaxation.hpp"

#include <doctest.h>

#include <random>

using namespace kshock;

namespace {

Vec random_vec(std::mt19937& rng, int n, double scale = 1.0)
{
  std::normal_distribution<double> g(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

RelaxationSystem sonic_broadwell()
{
  return make_broadwell({0.5, 0.3, broadwell_sonic_speed(0.5, 0.3)});
}

}  // namespace

TEST_CASE("quadratic map is exactly bilinear and its expansion is exact")
{
  std::mt19937 rng(3);
  for (const auto& sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    const int m = sys.m();
    Vec U = random_vec(rng, m), V = random_vec(rng, m), W = random_vec(rng, m);
    Vec lhs = sys.Q.bilinear(U + W, V);
    Vec rhs = sys.Q.bilinear(U, V) + sys.Q.bilinear(W, V);
    CHECK((lhs - rhs).norm() <= 1e-14 * (1.0 + lhs.norm()));
    CHECK((sys.Q.bilinear(U, V) - sys.Q.bilinear(V, U)).norm() <= 1e-14);
    Vec Ubar = sys.reference + random_vec(rng, m, 0.1);
    Vec full = sys.Q(Ubar + U);
    Vec expanded = sys.Q(Ubar) + sys.Q.jacobian(Ubar) * U + sys.Q.bilinear(U, U);
    CHECK((full - expanded).norm() <= 1e-13 * (1.0 + full.norm()));
  }
}

TEST_CASE("jin-xin model matches its closed-form Chapman-Enskog data")
{
  const double a = 1.3, kappa = 0.7, gamma = 1.1;
  ReducedSystem red(make_jin_xin(a, kappa, gamma));
  for (double u : {-0.2, 0.0, 0.05, 0.3}) {
    Vec uu = Vec::Constant(1, u);
    CEPoint p = red.at(uu);
    CHECK(p.v(0) == doctest::Approx(0.5 * gamma * u * u).epsilon(1e-12));
    CHECK(p.h(0) == doctest::Approx(0.5 * a * gamma * u * u).epsilon(1e-12));
    CHECK(p.dh(0, 0) == doctest::Approx(a * gamma * u).epsilon(1e-12));
    CHECK(p.c(0, 0) == doctest::Approx(-(a / kappa) * (1.0 - gamma * gamma * u * u)).epsilon(1e-12));
    CHECK(p.b(0, 0) == doctest::Approx((a * a / kappa) * (1.0 - gamma * gamma * u * u)).epsilon(1e-12));
    CHECK(p.b(0, 0) > 0.0);
  }
}

TEST_CASE("equilibrium solve and Jacobian cross-checks")
{
  ReducedSystem red(sonic_broadwell());
  const auto& sys = red.system();
  Vec u0 = red.base();
  Vec v0 = red.v_star(u0);
  CHECK((v0 - sys.reference.tail(sys.r)).norm() <= 1e-12);
  std::mt19937 rng(5);
  for (int k = 0; k < 5; ++k) {
    Vec u = u0 + random_vec(rng, 2, 0.05);
    Vec v = red.v_star(u);
    CHECK(sys.q(u, v).norm() <= 1e-10);
    auto fd = red.fd_check(u);
    CHECK(fd.dv <= 1e-5);
    CHECK(fd.dh <= 1e-5);
    CHECK(fd.ift <= 1e-12);
  }
  // Broadwell equilibria are the two-parameter family f0^2 = f+ f-.
  BroadwellModel spec{0.5, 0.3, broadwell_sonic_speed(0.5, 0.3)};
  Vec u = u0 + Vec::Constant(2, 0.03);
  Vec3 f = broadwell_densities(spec, sys.join(u, red.v_star(u)));
  CHECK(f(2) * f(2) == doctest::Approx(f(0) * f(1)).epsilon(1e-12));
}

TEST_CASE("equilibrium Newton failure is reported as an assumption error")
{
  RelaxationSystem sys = make_jin_xin(1.0, 1.0, 1.0);
  sys.Q.C.setZero();  // q no longer depends on v
  Vec u = Vec::Constant(1, 0.3);
  CHECK_THROWS_AS(solve_equilibrium(sys, u, Vec::Zero(1)), Error);
}

TEST_CASE("slow field of the sonic Broadwell model")
{
  ReducedSystem red(sonic_broadwell());
  SlowField sf = slow_field(red, red.base());
  CHECK(std::abs(sf.alpha) <= 1e-10);
  CHECK(sf.ratio <= 0.1);
  CHECK(sf.grad_alpha_r < 0.0);
  CHECK(sf.l.dot(sf.r) == doctest::Approx(1.0));
}

TEST_CASE("reduced system changes tensorially under a linear coordinate change")
{
  auto red = std::make_shared<ReducedSystem>(sonic_broadwell());
  Mat S{{1.0, 0.4}, {-0.3, 2.0}};
  LinearChange ch(red, S);
  Vec w = ch.base() + Vec::Constant(2, 0.02);
  Vec u = S * w;
  Mat Sinv = S.inverse();
  CHECK((ch.h(w) - Sinv * red->h(u)).norm() <= 1e-12);
  CHECK((ch.b(w) - Sinv * red->b(u) * S).norm() <= 1e-12);
  SlowField a = slow_field(*red, red->base());
  SlowField b = slow_field(ch, ch.base());
  CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-9));
}

TEST_CASE("nodal rescaling round trip and bounds")
{
  QuadratureGrid grid = build_grid(8, 5.0, 4);
  NodalRescaling s = rescale(grid);
  std::mt19937 rng(9);
  Vec f = random_vec(rng, grid.size());
  CHECK((s.from_tilde(s.to_tilde(f)) - f).cwiseAbs().maxCoeff() <= 1e-15 * f.cwiseAbs().maxCoeff());
  double amax = s.A_tilde.cwiseAbs().maxCoeff();
  double bound = 0.0;
  for (const auto& x : grid.nodes) bound = std::max(bound, std::abs(x(0)) / japanese(x));
  CHECK(amax <= bound + 1e-15);
  CHECK(amax < 1.0);
}
