#include "kshock/theorem.hpp"

#include <algorithm>
#include <cmath>

namespace kshock {

namespace {

double slope(const std::vector<double>& X, const std::vector<double>& Y)
{
  const double n = static_cast<double>(X.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < X.size(); ++i) {
    sx += X[i];
    sy += Y[i];
    sxx += X[i] * X[i];
    sxy += X[i] * Y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ProfileDiagnostics diagnose(const ReducedSystem& red, const ApproximateProfile& prof, const Profile& f, double delta)
{
  const RelaxationSystem& sys = red.system();
  const int N = prof.size();
  const int n = sys.n;
  const double h = prof.h();
  const Vec f_minus = sys.join(prof.u_minus, red.v_star(prof.u_minus));
  const Vec f_plus = sys.join(prof.u_plus, red.v_star(prof.u_plus));
  ProfileDiagnostics d;
  d.epsilon = prof.epsilon;
  std::vector<double> left(N), right(N);
  for (int i = 0; i < N; ++i) {
    const double x = prof.x(i);
    const double w = std::exp(delta * prof.epsilon * std::abs(x));
    d.max_du = std::max(d.max_du, (sys.fluid_map * (f[i].head(n) - prof.u[i])).norm());
    left[i] = (f[i] - f_minus).norm();
    right[i] = (f[i] - f_plus).norm();
    d.attach0 = std::max(d.attach0, w * (x < 0.0 ? left[i] : right[i]));
    Vec df;
    if (i == 0)
      df = (f[1] - f[0]) / h;
    else if (i == N - 1)
      df = (f[N - 1] - f[N - 2]) / h;
    else
      df = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d.attach1 = std::max(d.attach1, w * df.norm());
  }
  DecayFit fit = fit_decay(prof.x, left, right, prof.x(N - 1));
  d.decay_left = fit.rate_left;
  d.decay_right = fit.rate_right;
  d.residual = kinetic_residual(sys, prof.x, f, prof.h_minus).row_two;
  return d;
}

LocalizationFit localization(const GalerkinSystem& g, const Vec& c, double s)
{
  const FluidState& ref = g.basis.reference();
  const double T = ref.temperature();
  const Vec3 v = ref.velocity();
  const Mat G = g.gram_s(s);
  const Eigen::LLT<Mat> llt(G);
  require(llt.info() == Eigen::Success, ErrorKind::solver, "H^s Gram is not positive definite");
  LocalizationFit fit;
  fit.s = s;
  fit.norm = std::sqrt(c.dot(G * c));
  const int K = 40;
  const double tmax = 2.0 * std::sqrt(T);
  std::vector<Vec3> dirs;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int e = -1; e <= 1; ++e)
        if (a || b || e) dirs.push_back(Vec3(a, b, e).normalized());
  std::vector<double> X, Y, Xr, Yr;
  for (int k = 1; k <= K; ++k) {
    const double t = tmax * k / K;
    double shell = 0.0;
    for (size_t j = 0; j < dirs.size(); ++j) {
      const Vec3 xi = v + t * dirs[j];
      const Vec p = g.basis.eval(xi);
      const double M = maxwellian_at(ref, xi);
      // Envelope on the axial rays (+x, -x, +y).
      if (dirs[j] == Vec3(1, 0, 0) || dirs[j] == Vec3(-1, 0, 0) || dirs[j] == Vec3(0, 1, 0)) {
        X.push_back(t * t / (2.0 * T));
        Y.push_back(std::log(M * std::sqrt(p.dot(llt.solve(p))) * fit.norm));
      }
      shell = std::max(shell, std::abs(M * p.dot(c)));
    }
    if (shell > 0.0) {
      Xr.push_back(t * t / (2.0 * T));
      Yr.push_back(std::log(shell));
    }
  }
  fit.exponent = -slope(X, Y);
  fit.raw_exponent = Xr.size() >= 3 ? -slope(Xr, Yr) : 0.0;
  return fit;
}

NodalResidual nodal_kinetic_residual(const GalerkinSystem& g, const CollisionOperator& op, const Vec& x,
                                     const Profile& f, int samples)
{
  const VelocitySpace& space = op.space();
  const QuadratureGrid& grid = space.grid();
  const int N = static_cast<int>(x.size());
  require(samples >= 1 && N >= 3, ErrorKind::config, "nodal residual needs samples and three or more nodes");
  const double h = x(1) - x(0);
  const Vec w = space.weight(0.5);
  auto norm = [&](const Vec& v) { return std::sqrt(v.cwiseProduct(v).dot(w)); };
  Vec xi1(grid.size());
  for (int k = 0; k < grid.size(); ++k) xi1(k) = grid.nodes[k](0);
  NodalResidual out;
  for (int s = 0; s < samples; ++s) {
    const int i = samples == 1 ? N / 2 : 1 + static_cast<int>(std::lround(double(s) * (N - 3) / (samples - 1)));
    out.nodes.push_back(i);
    const Vec fi = g.nodal(f[i], grid);
    const Vec fx = g.nodal((f[i + 1] - f[i - 1]) / (2.0 * h), grid);
    out.residual = std::max(out.residual, norm(xi1.cwiseProduct(fx) - op.q_raw(fi, fi)));
    const Vec5 u = g.moment * f[i];
    const Vec M = maxwellian(FluidState::from_vec(u), grid);
    out.quadrature_error = std::max(out.quadrature_error, norm(op.q_raw(M, M)));
  }
  return out;
}

}  // namespace kshock
