#include "kshock/fixed_point.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

using namespace kshock;
using namespace kshock::testing;

namespace {

Profile random_profile(int N, int m, double scale, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Profile U(N, Vec::Zero(m));
  for (auto& u : U)
    for (int k = 0; k < m; ++k) u(k) = scale * g(rng);
  return U;
}

}  // namespace

TEST_CASE("fixed point on the scalar model: fast contraction and the shooting oracle")
{
  const double eps = 0.05;
  Setup coarse(make_jin_xin(1.0, 1.0, 1.0), eps, 601);
  Setup fine(make_jin_xin(1.0, 1.0, 1.0), eps, 1201);
  FixedPointResult a = iterate(coarse.sys(), coarse.approx, *coarse.op);
  FixedPointResult b = iterate(fine.sys(), fine.approx, *fine.op);
  for (const auto* r : {&a, &b}) {
    CHECK(r->converged);
    CHECK(r->iterations <= 8);
    for (double q : r->factors) CHECK(q < 1.0);
    CHECK(r->phase <= 1e-14);
    CHECK(r->residual.row_one <= 1e-7);
    CHECK(r->residual.row_two <= 1e-7);
    CHECK(r->corrector_norm <= r->ball_radius);
  }
  // Scalar ODE u' = (u^2/2 - h) / a kappa integrated independently from the left endstate.
  const Vec l = coarse.op->phase();
  const double level = l.dot(a.f[coarse.approx.center].head(1));
  Profile shot = shoot_profile(coarse.sys(), coarse.approx.U.front(), coarse.approx.U.back(), l, level,
                               coarse.approx.x);
  Profile extrapolated = richardson(a.f, b.f);
  TranslationFit fit = translation_normalize(coarse.approx.x, extrapolated, shot);
  CHECK(fit.distance <= 1e-8);
  CHECK(std::abs(fit.shift) <= coarse.approx.h());
  // The unextrapolated box profile is only second order in h.
  CHECK(max_diff(a.f, shot) > 100.0 * fit.distance);
}

TEST_CASE("shooting oracle reproduces the closed-form scalar profile")
{
  // a = kappa = gamma = 1, u- = eps/2: u(x) = -(eps/2) tanh(eps x / 4), v = eps^2 / 8.
  const double eps = 0.1;
  RelaxationSystem sys = make_jin_xin(1.0, 1.0, 1.0);
  Vec um(2), up(2), l(1);
  um << eps / 2, eps * eps / 8;
  up << -eps / 2, eps * eps / 8;
  l << 1.0;
  Vec x = Vec::LinSpaced(401, -200.0, 200.0);
  Profile shot = shoot_profile(sys, um, up, l, 0.0, x);
  double err = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    err = std::max(err, std::abs(shot[i](0) + 0.5 * eps * std::tanh(eps * x(i) / 4.0)));
    CHECK(std::abs(shot[i](1) - eps * eps / 8) <= 1e-14);
  }
  CHECK(err <= 1e-11);
}

TEST_CASE("corrector norm scales like eps^2 on the two-speed model")
{
  std::vector<double> eps{0.1, 0.05, 0.025}, norm, first, m_norm;
  for (double e : eps) {
    Setup s(sonic_broadwell(), e);
    FixedPointResult r = iterate(s.sys(), s.approx, *s.op);
    CHECK(r.converged);
    CHECK(r.iterations <= 10);
    for (size_t k = 1; k < r.factors.size(); ++k) CHECK(r.factors[k] < 1.0);
    CHECK(r.corrector_norm <= r.ball_radius);
    CHECK(r.residual.row_two <= 1e-7);
    norm.push_back(r.corrector_norm);
    first.push_back(r.first_norm);
    double mm = 0.0;
    for (const auto& M : s.approx.M) mm = std::max(mm, M.norm());
    m_norm.push_back(mm);
  }
  for (int k = 0; k < 2; ++k) {
    CHECK(norm[k] / norm[k + 1] >= 3.0);
    CHECK(norm[k] / norm[k + 1] <= 5.0);
    CHECK(first[k] / first[k + 1] >= 3.0);
    CHECK(first[k] / first[k + 1] <= 5.0);
    CHECK(m_norm[k] / m_norm[k + 1] >= 4.0 * 0.7);
    CHECK(m_norm[k] / m_norm[k + 1] <= 4.0 * 1.3);
  }
  CHECK(fit_order(eps, norm) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("nonlinear remainder is exactly the bilinear collision form")
{
  Setup s(sonic_broadwell(), 0.05, 201);
  const RelaxationSystem& sys = s.sys();
  Profile U = random_profile(s.approx.size(), sys.m(), 1e-3, 4);
  for (int i = 0; i < s.approx.size(); i += 20) {
    const Vec& base = s.approx.U[i];
    Vec full = sys.Q(base + U[i]).tail(sys.r);
    Vec split = sys.Q(base).tail(sys.r) + (s.approx.Qlin[i] + s.approx.M[i]) * U[i] +
                sys.Q.bilinear(U[i], U[i]).tail(sys.r);
    CHECK((full - split).norm() <= 1e-15);
  }
  // The iteration source is affine plus quadratic in U.
  Profile g0 = iteration_source(sys, s.approx, Profile(s.approx.size(), Vec::Zero(sys.m())));
  Profile g1 = iteration_source(sys, s.approx, U);
  for (int i = 0; i + 1 < s.approx.size(); i += 20) {
    Vec w = 0.5 * (s.approx.M[i] * U[i] + sys.Q.bilinear(U[i], U[i]).tail(sys.r) + s.approx.M[i + 1] * U[i + 1] +
                   sys.Q.bilinear(U[i + 1], U[i + 1]).tail(sys.r));
    CHECK((g1[i] - g0[i] - w).norm() <= 1e-16);
  }
}

TEST_CASE("uniqueness up to translation across solver paths and initial iterates")
{
  Setup s(sonic_broadwell(), 0.05);
  const double tol = 10.0 * FixedPointOptions{}.tol;
  FixedPointResult bordered = iterate(s.sys(), s.approx, *s.op);

  FixedPointOptions viscous;
  viscous.viscous = true;
  FixedPointResult v = iterate(s.sys(), s.approx, *s.op, viscous);
  CHECK(v.converged);
  CHECK(translation_normalize(s.approx.x, bordered.f, v.f).distance <= tol);

  FixedPointOptions start;
  start.initial = random_profile(s.approx.size(), s.sys().m(), 0.2 * std::pow(0.05, 1.5), 9);
  FixedPointResult w = iterate(s.sys(), s.approx, *s.op, start);
  CHECK(w.converged);
  CHECK(translation_normalize(s.approx.x, bordered.f, w.f).distance <= tol);
}

TEST_CASE("divergent iteration is reported with its history")
{
  Setup s(sonic_broadwell(), 0.05, 201);
  FixedPointOptions opt;
  opt.initial = random_profile(s.approx.size(), s.sys().m(), 50.0, 2);
  bool thrown = false;
  try {
    iterate(s.sys(), s.approx, *s.op, opt);
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::solver;
  }
  CHECK(thrown);
}

TEST_CASE("translation normalization recovers grid shifts")
{
  Vec x = Vec::LinSpaced(801, -40.0, 40.0);
  const double h = x(1) - x(0);
  auto profile = [&](double s0) {
    Profile p(x.size());
    for (int i = 0; i < x.size(); ++i) p[i] = Vec::Constant(1, std::tanh(0.3 * (x(i) - s0)));
    return p;
  };
  Profile a = profile(0.0);
  TranslationFit fit = translation_normalize(x, a, profile(3.0 * h));
  CHECK(fit.shift == doctest::Approx(3.0 * h).epsilon(1e-6));
  CHECK(fit.distance <= 1e-12);
  TranslationFit frac = translation_normalize(x, a, profile(-2.4 * h));
  CHECK(frac.shift == doctest::Approx(-2.4 * h).epsilon(1e-3));
  CHECK(frac.distance <= 1e-4);
}

TEST_CASE("richardson and order fits")
{
  std::vector<double> eps{0.1, 0.05, 0.025};
  CHECK(fit_order(eps, {3e-3, 3e-3 / 4, 3e-3 / 16}) == doctest::Approx(2.0).epsilon(1e-12));
  Profile coarse{Vec::Constant(1, 1.0 + 4.0), Vec::Constant(1, 2.0 + 4.0)};
  Profile fine{Vec::Constant(1, 1.0 + 1.0), Vec::Constant(1, 0.0), Vec::Constant(1, 2.0 + 1.0)};
  Profile r = richardson(coarse, fine);
  CHECK(r[0](0) == doctest::Approx(1.0));
  CHECK(r[1](0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(richardson(coarse, coarse), Error);
}
