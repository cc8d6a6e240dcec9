#include "kshock/velocity_space.hpp"

#include <doctest.h>

#include <random>

using namespace kshock;

namespace {

FluidState unit_state() { return FluidState::from_primitive(1.0, Vec3::Zero(), 0.75); }

}  // namespace

TEST_CASE("gauss-legendre and gauss-hermite rules integrate polynomials exactly")
{
  Rule1D gl = gauss_legendre(6);
  double s = 0.0;
  for (size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * std::pow(gl.x[i], 10);
  CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
  Rule1D gh = gauss_hermite(5);
  double m4 = 0.0, m8 = 0.0;
  for (size_t i = 0; i < gh.x.size(); ++i) {
    m4 += gh.w[i] * std::pow(gh.x[i], 4);
    m8 += gh.w[i] * std::pow(gh.x[i], 8);
  }
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(m8 == doctest::Approx(105.0).epsilon(1e-12));
}

TEST_CASE("radial rule reproduces moments of t^2 exp(-t^2)")
{
  Rule1D r = gauss_radial_t2(6);
  // int_0^inf t^{2+k} e^{-t^2} dt = Gamma((3+k)/2)/2
  for (int k = 0; k <= 11; ++k) {
    double s = 0.0;
    for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], k);
    CHECK(s == doctest::Approx(0.5 * std::tgamma(0.5 * (3 + k))).epsilon(1e-11));
  }
}

TEST_CASE("sphere product rule weights and antipodal symmetry")
{
  SphereRule s = sphere_product_rule(4, 8);
  double total = 0.0, zz = 0.0;
  for (size_t k = 0; k < s.nodes.size(); ++k) {
    CHECK(std::abs(s.nodes[k].norm() - 1.0) < 1e-12);
    total += s.w[k];
    zz += s.w[k] * s.nodes[k](2) * s.nodes[k](2);
  }
  CHECK(total == doctest::Approx(4 * pi).epsilon(1e-13));
  CHECK(zz == doctest::Approx(4 * pi / 3).epsilon(1e-13));
}

TEST_CASE("build_grid: node count, symmetry and Gaussian integral")
{
  QuadratureGrid g = build_grid(8, 5.0, 4);
  CHECK(g.size() == 512);
  double gauss = 0.0, odd = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const Vec3& x = g.nodes[i];
    CHECK(x.cwiseAbs().maxCoeff() <= 5.0);
    gauss += g.weights(i) * std::exp(-x.squaredNorm());
    odd += g.weights(i) * x(0) * std::exp(-x.squaredNorm());
  }
  CHECK(std::abs(gauss - 5.568328) < 1e-4);
  CHECK(std::abs(odd) < 1e-15);
  CHECK_THROWS_AS(build_grid(3, 5.0, 4), Error);
  CHECK_THROWS_AS(build_grid(4, 30.0, 4), Error);
}

TEST_CASE("maxwellian closed form, linearity and moments")
{
  FluidState u = unit_state();
  CHECK(maxwellian_at(u, Vec3::Zero()) == doctest::Approx(0.1795871).epsilon(1e-6));
  QuadratureGrid g = build_grid(16, 6.0, 4);
  Vec m1 = maxwellian(u, g);
  FluidState u2 = u;
  u2.rho = 2.0;
  u2.total_energy = 1.5;
  CHECK((maxwellian(u2, g) - 2.0 * m1).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(moments(Vec::Zero(g.size()), g).norm() == 0.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  for (int k = 0; k < 10; ++k) {
    FluidState s = FluidState::from_primitive(1.0 + U(rng), Vec3(U(rng), U(rng), U(rng)), 0.75 + U(rng));
    Vec5 d = moments(maxwellian(s, g), g) - s.vec();
    CHECK(d.norm() <= 1e-6 * (1.0 + s.vec().norm()));
  }
  FluidState bad = FluidState::from_primitive(1.0, Vec3::Zero(), -0.1);
  CHECK_THROWS_AS(maxwellian(bad, g), Error);
}

TEST_CASE("moments of chi_1 M against a double-resolution oracle")
{
  FluidState u = FluidState::from_primitive(1.0, Vec3(0.2, 0.0, 0.0), 0.75);
  auto moment_of = [&](const QuadratureGrid& g) {
    Vec f(g.size());
    double sT = std::sqrt(u.temperature());
    for (int i = 0; i < g.size(); ++i) f(i) = (g.nodes[i](0) - 0.2) / sT * maxwellian_at(u, g.nodes[i]);
    return moments(f, g);
  };
  Vec5 coarse = moment_of(build_grid(12, 6.0, 4));
  Vec5 fine = moment_of(build_grid(24, 6.0, 4));
  CHECK((coarse - fine).norm() < 1e-6);
  // Even-in-(xi_2, xi_3) function: transverse momenta vanish exactly.
  CHECK(std::abs(coarse(2)) < 1e-16);
  CHECK(std::abs(coarse(3)) < 1e-16);
}

TEST_CASE("weighted norms")
{
  FluidState u = unit_state();
  VelocitySpace space(build_grid(16, 6.0, 4), u);
  const Vec& m = space.reference_maxwellian();
  CHECK(space.weighted_norm(m, 0.5) * space.weighted_norm(m, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(space.weighted_norm(Vec::Zero(m.size()), 0.75) == 0.0);
  Vec f = m.cwiseProduct(Vec::LinSpaced(m.size(), -1.0, 1.0));
  CHECK(space.weighted_norm(f, 0.75, 0.0) == space.weighted_norm(f, 0.75));
  double a = space.weighted_norm(f, 0.75, 2.0);
  CHECK(a * a == doctest::Approx(std::pow(space.weighted_norm(f, 0.75), 2) + 2.0 * std::pow(space.weighted_norm(f, 0.5), 2)));
  CHECK(space.weighted_norm(3.0 * f, 0.6) == doctest::Approx(3.0 * space.weighted_norm(f, 0.6)));
  CHECK_THROWS_AS(space.weighted_norm(f, 1.5), Error);
  CHECK_THROWS_AS(space.weighted_norm(f, 0.0), Error);
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 100; ++k) {
    Vec x(m.size()), y(m.size());
    for (int i = 0; i < m.size(); ++i) {
      x(i) = m(i) * nd(rng);
      y(i) = m(i) * nd(rng);
    }
    CHECK(space.weighted_norm(x + y, 0.5, 0.3) <= space.weighted_norm(x, 0.5, 0.3) + space.weighted_norm(y, 0.5, 0.3) + 1e-14);
  }
}
