#include "kshock/linear_solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

using namespace kshock;
using namespace kshock::testing;

namespace {

Sources combine(double a, const Sources& F, double b, const Sources& G)
{
  Sources H = F;
  for (size_t i = 0; i < H.f.size(); ++i) H.f[i] = a * F.f[i] + b * G.f[i];
  for (size_t i = 0; i < H.g.size(); ++i) H.g[i] = a * F.g[i] + b * G.g[i];
  return H;
}

}  // namespace

TEST_CASE("bordered solve: round trip, exact phase, linearity")
{
  for (auto sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    Setup s(sys, 0.05);
    const ProfileOperator& op = *s.op;
    const int n = sys.n;
    CHECK(op.boundary_rows() == sys.r - 1);

    Sources F = random_sources(s.approx.x, n, sys.r, 0.05, 11);
    Profile U = op.solve(F);
    CHECK(op.relative_residual(U, F) <= 1e-9);
    CHECK(std::abs(op.phase().dot(U[s.approx.center].head(n))) <= 1e-13);

    // Round trip through the range of the operator.
    Sources F2 = op.apply(U);
    Profile U2 = op.solve(F2);
    CHECK(max_diff(U, U2) <= 1e-9 * max_abs(U));

    // Row one has no derivative: it is the nodal flux A1 U.
    for (int i = 0; i < s.approx.size(); i += 37)
      CHECK((F2.f[i] - sys.A.topRows(n) * U[i]).norm() == 0.0);

    Sources G = random_sources(s.approx.x, n, sys.r, 0.05, 12);
    Profile V = op.solve(G);
    Profile W = op.solve(combine(2.0, F, -3.0, G));
    Profile lin(U.size());
    for (size_t i = 0; i < U.size(); ++i) lin[i] = 2.0 * U[i] - 3.0 * V[i];
    CHECK(max_diff(W, lin) <= 1e-9 * max_abs(lin));

    Sources Z = combine(0.0, F, 0.0, G);
    CHECK(max_abs(op.solve(Z)) == 0.0);
  }
}

TEST_CASE("viscous paths converge to the bordered solution as eta -> 0")
{
  for (auto sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    Setup s(sys, 0.05);
    const ProfileOperator& op = *s.op;
    Sources F = random_sources(s.approx.x, sys.n, sys.r, 0.05, 5);
    Profile U = op.solve(F);
    const double scale = max_abs(U);

    // Single viscous solves approach the bordered solution at first order in eta.
    double prev = std::numeric_limits<double>::infinity();
    for (double eta : {1e-2, 1e-3, 1e-4}) {
      const double d = max_diff(op.solve_viscous(F, eta), U) / scale;
      CHECK(d < prev);
      CHECK(d <= 50.0 * eta);
      prev = d;
    }
    Profile V = op.solve_viscous_limit(F, kViscosityLadder);
    CHECK(max_diff(V, U) <= 1e-8 * scale);
    CHECK(std::abs(op.phase().dot(V[s.approx.center].head(sys.n))) <= 1e-13);

    // The first-order system with dichotomy conditions gives the same limit.
    Profile W = op.solve_viscous_limit(F, kViscosityLadder, true);
    CHECK(max_diff(W, U) <= 1e-8 * scale);
  }
}

TEST_CASE("endstate matrices: dimension counts, slow eigenvalue, spectral strip")
{
  for (auto sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    double theta_min = std::numeric_limits<double>::infinity(), theta_max = 0.0;
    for (double eps : {0.1, 0.05, 0.025}) {
      Setup s(sys, eps);
      const Mat dhm = s.red->dh(s.approx.u_minus), dhp = s.red->dh(s.approx.u_plus);
      for (double eta : {10.0, 1.0}) {
        EndstateReport rep = s.op->endstate_spectrum(eta, dhm, dhp);
        CHECK(rep.dims_ok);
        CHECK(rep.balance_ok);
      }
      SlowModeData sm = slow_mode_data(*s.red, s.ns);
      for (double eta : {1e-2, 1e-3}) {
        EndstateReport rep = s.op->endstate_spectrum(eta, dhm, dhp);
        CHECK(rep.dims_ok);
        CHECK(std::abs(rep.slow_minus - sm.mu_minus) <= 0.5 * std::abs(sm.mu_minus));
        CHECK(std::abs(rep.slow_plus - sm.mu_plus) <= 0.5 * std::abs(sm.mu_plus));
        theta_min = std::min(theta_min, rep.min_abs_re / eps);
        theta_max = std::max(theta_max, rep.min_abs_re / eps);
      }
    }
    CHECK(theta_min > 0.05);
    CHECK(theta_max <= 3.0 * theta_min);
  }
}

TEST_CASE("estimate constants are stable across the epsilon sweep")
{
  for (auto sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    std::vector<double> ch2, cl2;
    for (double eps : {0.1, 0.05, 0.025}) {
      Setup s(sys, eps);
      double a = 0.0, b = 0.0;
      for (unsigned seed = 1; seed <= 4; ++seed) {
        EstimateSample e =
            estimate_sample(*s.op, s.approx, random_sources(s.approx.x, sys.n, sys.r, eps, seed), 0.0);
        CHECK(e.residual <= 1e-9);
        CHECK(e.phase <= 1e-13);
        a = std::max(a, e.c_h2);
        b = std::max(b, e.c_l2);
      }
      ch2.push_back(a);
      cl2.push_back(b);
    }
    for (const auto* c : {&ch2, &cl2}) {
      std::vector<double> sorted = *c;
      std::sort(sorted.begin(), sorted.end());
      const double med = sorted[1];
      for (double v : *c) {
        CHECK(v >= 0.5 * med);
        CHECK(v <= 1.5 * med);
      }
    }
  }
}

TEST_CASE("phase vector normalization against the profile derivative")
{
  for (auto sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    const bool jin_xin = sys.n == 1;
    std::vector<double> ratio;
    for (double eps : {0.1, 0.05, 0.025}) {
      Setup s(sys, eps);
      const Vec l = s.op->phase();
      CHECK(std::abs(l.norm() - 1.0) <= 1e-14);
      CHECK(std::abs(l.dot(s.slow.r.normalized())) >= 0.1);
      ratio.push_back(std::abs(l.dot(s.ns.du[s.ns.center])) / (eps * eps));
    }
    for (double q : ratio) {
      // Closed form for a = kappa = gamma = 1: |u'(0)| = c^2 / 2 with c = eps / 2.
      if (jin_xin) CHECK(q == doctest::Approx(0.125).epsilon(1e-3));
      CHECK(q >= 0.5 * ratio[1]);
      CHECK(q <= 1.5 * ratio[1]);
    }
  }
}

TEST_CASE("phase vector transverse to the translation mode is reported")
{
  Setup s(sonic_broadwell(), 0.05);
  const Vec du = s.ns.du[s.ns.center];
  Vec l(2);
  l << -du(1), du(0);
  ProfileOperator bad(s.red->system(), s.approx, l);
  Sources F = random_sources(s.approx.x, 2, 1, 0.05, 3);
  bool thrown = false;
  try {
    bad.solve(F);
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::solver && std::string(e.what()).find("near-kernel") != std::string::npos;
  }
  CHECK(thrown);
  CHECK(s.op->condition_estimate() < 1e8);
}

TEST_CASE("approximate profile: exact row one, higher-order box residual")
{
  for (auto sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    std::vector<double> res;
    for (double eps : {0.1, 0.05}) {
      Setup s(sys, eps);
      CHECK(s.approx.row_one_defect <= 1e-13);
      double r = 0.0;
      for (const auto& v : s.approx.residual) r = std::max(r, v.norm());
      res.push_back(r);
      KineticResidual k = kinetic_residual(sys, s.approx.x, s.approx.U, s.approx.h_minus);
      CHECK(k.row_one <= 1e-13);
      CHECK(k.row_two == doctest::Approx(r).epsilon(1e-12));
    }
    CHECK(std::log2(res[0] / res[1]) >= 2.5);
  }
}

TEST_CASE("weighted norms against closed forms")
{
  const int N = 2001;
  const double L = 10.0, eps = 0.2;
  Vec x = Vec::LinSpaced(N, -L, L);
  const double h = x(1) - x(0);
  Profile one(N, Vec::Ones(1)), lin(N);
  for (int i = 0; i < N; ++i) lin[i] = Vec::Constant(1, x(i));
  // Riemann sums of the constant: sqrt(N h).
  CHECK(weighted_norm(x, one, 0, eps, 0.0) == doctest::Approx(std::sqrt(eps * N * h)).epsilon(1e-12));
  CHECK(weighted_norm(x, one, 2, eps, 0.0) == doctest::Approx(std::sqrt(eps * N * h)).epsilon(1e-12));
  // Linear function: derivative term eps^{-1} ||1|| over N - 1 midpoints.
  const double l2 = std::sqrt(eps) * std::sqrt(h * x.squaredNorm());
  const double d1 = std::pow(eps, -0.5) * std::sqrt((N - 1) * h);
  CHECK(weighted_norm(x, lin, 1, eps, 0.0) == doctest::Approx(l2 + d1).epsilon(1e-12));
  // Exponential weight on a constant.
  double s = 0.0;
  for (int i = 0; i < N; ++i) s += h * std::exp(2.0 * 0.5 * eps * std::sqrt(1.0 + x(i) * x(i)));
  CHECK(weighted_norm(x, one, 0, eps, 0.5) == doctest::Approx(std::sqrt(eps * s)).epsilon(1e-12));
  Mat G = Mat::Constant(1, 1, 4.0);
  CHECK(weighted_norm(x, one, 0, eps, 0.0, &G) == doctest::Approx(2.0 * std::sqrt(eps * N * h)).epsilon(1e-12));
}
