#include "kshock/fixed_point.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kshock {

namespace {

const Mat* metric_of(const RelaxationSystem& sys)
{
  return sys.metric.size() > 0 ? &sys.metric : nullptr;
}

Profile difference(const Profile& a, const Profile& b)
{
  Profile d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

double profile_norm(const RelaxationSystem& sys, const ApproximateProfile& prof, const Profile& U, double delta, int k)
{
  return weighted_norm(prof.x, U, k, prof.epsilon, delta, metric_of(sys));
}

Profile iteration_source(const RelaxationSystem& sys, const ApproximateProfile& prof, const Profile& U)
{
  const int N = prof.size();
  const int r = sys.r;
  std::vector<Vec> w(N);
  for (int i = 0; i < N; ++i) w[i] = prof.M[i] * U[i] + sys.Q.bilinear(U[i], U[i]).tail(r);
  Profile g(N - 1);
  for (int i = 0; i + 1 < N; ++i) g[i] = -prof.residual[i] + 0.5 * (w[i] + w[i + 1]);
  return g;
}

FixedPointResult iterate(const RelaxationSystem& sys, const ApproximateProfile& prof, const ProfileOperator& op,
                         const FixedPointOptions& opt)
{
  const int N = prof.size();
  const int m = sys.m();
  const Mat* G = opt.metric.size() > 0 ? &opt.metric : metric_of(sys);
  auto norm = [&](const Profile& V) { return weighted_norm(prof.x, V, 2, prof.epsilon, opt.delta, G); };
  FixedPointResult res;
  res.ball_radius = std::pow(prof.epsilon, 1.5);
  Profile U = opt.initial.empty() ? Profile(N, Vec::Zero(m)) : opt.initial;
  require(static_cast<int>(U.size()) == N, ErrorKind::config, "initial iterate has the wrong number of nodes");
  Sources F;
  F.f.assign(N, Vec::Zero(sys.n));
  int above_one = 0;
  for (int k = 0; k < opt.max_iter; ++k) {
    F.g = iteration_source(sys, prof, U);
    Profile next = opt.viscous ? op.solve_viscous_limit(F, kViscosityLadder) : op.solve(F);
    const double step = norm(difference(next, U));
    if (k == 0) res.first_norm = norm(next);
    if (!std::isfinite(step)) fail(ErrorKind::solver, "fixed-point iterate is not finite");
    if (!res.steps.empty()) {
      const double q = step / res.steps.back();
      res.factors.push_back(q);
      above_one = q >= 1.0 ? above_one + 1 : 0;
    }
    res.steps.push_back(step);
    U = std::move(next);
    res.iterations = k + 1;
    if (above_one >= opt.divergence_window) {
      std::ostringstream msg;
      msg << "fixed-point divergence: contraction factor >= 1 for " << above_one << " iterates; steps";
      for (double s : res.steps) msg << ' ' << s;
      fail(ErrorKind::solver, msg.str());
    }
    if (step <= opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.f.resize(N);
  for (int i = 0; i < N; ++i) res.f[i] = prof.U[i] + U[i];
  res.corrector_norm = norm(U);
  res.phase = std::abs(op.phase().dot(U[prof.center].head(sys.n)));
  res.residual = kinetic_residual(sys, prof.x, res.f, prof.h_minus);
  res.U = std::move(U);
  return res;
}

Profile shoot_profile(const RelaxationSystem& sys, const Vec& U_minus, const Vec& U_plus, const Vec& phase,
                      double level, const Vec& x, const ShootingOptions& opt)
{
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  require(sys.r == 1, ErrorKind::assumption, "shooting oracle needs a one-dimensional flux level set");
  const int m = sys.m(), n = sys.n;
  Eigen::PartialPivLU<Mat> Alu(sys.A);
  auto rhs = [&](const State& y, State& dy, double) {
    Vec U = Eigen::Map<const Vec>(y.data(), m);
    Vec d = Alu.solve(sys.Q(U));
    dy.assign(d.data(), d.data() + m);
  };
  auto to_vec = [&](const State& y) { return Vec(Eigen::Map<const Vec>(y.data(), m)); };
  auto phi = [&](const State& y) { return phase.dot(to_vec(y).head(n)) - level; };

  Eigen::EigenSolver<Mat> es(Alu.solve(sys.Q.jacobian(U_minus)));
  int k = 0;
  for (int i = 1; i < m; ++i)
    if (es.eigenvalues()(i).real() > es.eigenvalues()(k).real()) k = i;
  require(es.eigenvalues()(k).real() > 0.0 && std::abs(es.eigenvalues()(k).imag()) < 1e-12, ErrorKind::assumption,
          "left endstate has no real unstable direction");
  Vec e = es.eigenvectors().col(k).real().normalized();
  if (e.dot(U_plus - U_minus) < 0.0) e = -e;
  const double lambda = es.eigenvalues()(k).real();
  Vec y0v = U_minus + opt.offset * (U_plus - U_minus).norm() * e;
  State y(y0v.data(), y0v.data() + m);

  auto stepper = ode::make_dense_output(opt.tol, opt.tol, ode::runge_kutta_dopri5<State>());
  const double s0 = phi(y);
  require(s0 != 0.0, ErrorKind::solver, "shooting starts on the phase level");
  stepper.initialize(y, 0.0, 0.1 / lambda);
  const double t_max = 200.0 / lambda;
  while (true) {
    auto span = stepper.do_step(rhs);
    if (phi(stepper.current_state()) * s0 <= 0.0) {
      double a = span.first, b = span.second;
      State tmp(m);
      for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(b)); ++it) {
        const double c = 0.5 * (a + b);
        stepper.calc_state(c, tmp);
        (phi(tmp) * s0 > 0.0 ? a : b) = c;
      }
      stepper.calc_state(0.5 * (a + b), y);
      break;
    }
    require(stepper.current_time() < t_max, ErrorKind::solver, "shooting did not reach the phase level");
  }

  const int N = static_cast<int>(x.size());
  Profile out(N, Vec::Zero(m));
  std::vector<double> fwd, bwd;
  std::vector<int> fi, bi;
  for (int i = 0; i < N; ++i) {
    if (x(i) == 0.0) {
      out[i] = to_vec(y);
    } else if (x(i) > 0.0) {
      fwd.push_back(x(i));
      fi.push_back(i);
    }
  }
  for (int i = N - 1; i >= 0; --i) {
    if (x(i) < 0.0) {
      bwd.push_back(x(i));
      bi.push_back(i);
    }
  }
  auto run = [&](std::vector<double> times, const std::vector<int>& idx, double dt) {
    if (times.empty()) return;
    times.insert(times.begin(), 0.0);
    State s = y;
    size_t j = 0;
    auto obs = [&](const State& st, double) {
      if (j > 0 && j <= idx.size()) out[idx[j - 1]] = to_vec(st);
      ++j;
    };
    ode::integrate_times(ode::make_dense_output(opt.tol, opt.tol, ode::runge_kutta_dopri5<State>()), rhs, s,
                         times.begin(), times.end(), dt, obs);
  };
  run(fwd, fi, 0.1 / lambda);
  run(bwd, bi, -0.1 / lambda);
  return out;
}

Vec interpolate(const Vec& x, const Profile& a, double y)
{
  const int N = static_cast<int>(x.size());
  const double h = x(1) - x(0);
  const double t = (y - x(0)) / h;
  int i = static_cast<int>(std::floor(t));
  i = std::clamp(i, 1, N - 3);
  const double s = t - i;
  const Vec& p0 = a[i - 1];
  const Vec& p1 = a[i];
  const Vec& p2 = a[i + 1];
  const Vec& p3 = a[i + 2];
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * s + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s * s * s);
}

TranslationFit translation_normalize(const Vec& x, const Profile& a, const Profile& b, double max_shift)
{
  const int N = static_cast<int>(x.size());
  const double h = x(1) - x(0);
  const int K = max_shift > 0.0 ? static_cast<int>(std::ceil(max_shift / h)) : N / 10;
  auto node_distance = [&](int k) {
    double d = 0.0;
    for (int i = 0; i < N; ++i) {
      const int j = i + k;
      if (j < 0 || j >= N) continue;
      d = std::max(d, (a[i] - b[j]).lpNorm<Eigen::Infinity>());
    }
    return d;
  };
  int best = 0;
  double bd = node_distance(0);
  for (int k = -K; k <= K; ++k) {
    const double d = node_distance(k);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  auto distance = [&](double s) {
    double d = 0.0;
    for (int i = 0; i < N; ++i) {
      const double y = x(i) + s;
      if (y < x(1) || y > x(N - 2)) continue;
      d = std::max(d, (a[i] - interpolate(x, b, y)).lpNorm<Eigen::Infinity>());
    }
    return d;
  };
  // Golden-section search on the bracketing interval.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = (best - 1) * h, hi = (best + 1) * h;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = distance(c), fd = distance(d);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * h; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = distance(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = distance(d);
    }
  }
  TranslationFit fit;
  fit.shift = 0.5 * (lo + hi);
  fit.distance = distance(fit.shift);
  return fit;
}

Profile richardson(const Profile& coarse, const Profile& fine)
{
  require(fine.size() == 2 * coarse.size() - 1, ErrorKind::config, "richardson: fine grid must have 2N - 1 nodes");
  Profile out(coarse.size());
  for (size_t i = 0; i < coarse.size(); ++i) out[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
  return out;
}

double fit_order(const std::vector<double>& eps, const std::vector<double>& value)
{
  require(eps.size() == value.size() && eps.size() >= 2, ErrorKind::config, "fit_order needs two or more points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double k = static_cast<double>(eps.size());
  for (size_t i = 0; i < eps.size(); ++i) {
    const double lx = std::log(eps[i]), ly = std::log(value[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace kshock
