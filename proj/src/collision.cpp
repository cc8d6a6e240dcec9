#include "kshock/collision.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace kshock {

CollisionGeometry collide(const Vec3& xi, const Vec3& xi_star, const Vec3& omega)
{
  CollisionGeometry c{xi, xi_star, omega, xi, xi_star};
  double a = omega.dot(xi_star - xi);
  c.xi_prime = xi + a * omega;
  c.xi_star_prime = xi_star - a * omega;
  return c;
}

namespace {

// Locate x in the sorted axis; returns false outside the hull.
bool locate(const std::vector<double>& axis, double x, int& i0, double& t)
{
  if (x < axis.front() || x > axis.back()) return false;
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  int i = static_cast<int>(it - axis.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(axis.size()) - 2);
  i0 = i;
  t = (x - axis[i]) / (axis[i + 1] - axis[i]);
  return true;
}

}  // namespace

Stencil trilinear(const QuadratureGrid& grid, const Vec3& x)
{
  Stencil s;
  int i[3];
  double t[3];
  for (int d = 0; d < 3; ++d)
    if (!locate(grid.axis, x(d), i[d], t[d])) return s;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double w = (a ? t[0] : 1 - t[0]) * (b ? t[1] : 1 - t[1]) * (c ? t[2] : 1 - t[2]);
        s.idx[s.count] = grid.index(i[0] + a, i[1] + b, i[2] + c);
        s.w[s.count] = w;
        ++s.count;
      }
  return s;
}

CollisionOperator::CollisionOperator(const VelocitySpace& space, std::shared_ptr<const CollisionKernel> kernel)
    : space_(space)
    , kernel_(std::move(kernel))
{
  const auto& g = space_.grid();
  const Vec& m = space_.reference_maxwellian();
  Mat5 gram = Mat5::Zero();
  for (int i = 0; i < g.size(); ++i) {
    Vec5 p = psi(g.nodes[i]);
    gram += g.weights(i) * m(i) * p * p.transpose();
  }
  psi_gram_inv_ = gram.inverse();
}

Vec CollisionOperator::nu(const Vec& h) const
{
  const auto& g = space_.grid();
  const int n = g.size();
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += g.weights(j) * h(j) * kernel_->total((g.nodes[i] - g.nodes[j]).norm());
    out(i) = acc;
  }
  return out;
}

Vec CollisionOperator::q_gain(const Vec& gf, const Vec& hf) const
{
  const auto& g = space_.grid();
  const auto& sph = g.sphere;
  const int n = g.size();
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      Vec3 G = 0.5 * (g.nodes[i] + g.nodes[j]);
      Vec3 rel = g.nodes[i] - g.nodes[j];
      double r = rel.norm();
      if (r == 0.0) continue;
      Vec3 ghat = rel / r;
      double inner = 0.0;
      for (size_t k = 0; k < sph.nodes.size(); ++k) {
        const Vec3& sg = sph.nodes[k];
        Stencil sp = trilinear(g, G + 0.5 * r * sg);
        if (sp.count == 0) continue;
        Stencil ss = trilinear(g, G - 0.5 * r * sg);
        if (ss.count == 0) continue;
        inner += sph.w[k] * kernel_->b(r, ghat.dot(sg)) * sp.apply(gf) * ss.apply(hf);
      }
      acc += g.weights(j) * inner;
    }
    out(i) = acc;
  }
  return out;
}

Vec CollisionOperator::q_raw(const Vec& g, const Vec& h) const { return q_gain(g, h) - g.cwiseProduct(nu(h)); }

Vec CollisionOperator::project_micro(const Vec& f) const
{
  const auto& g = space_.grid();
  const Vec& m = space_.reference_maxwellian();
  Vec5 c = psi_gram_inv_ * moments(f, g);
  Vec out = f;
  for (int i = 0; i < g.size(); ++i) out(i) -= m(i) * psi(g.nodes[i]).dot(c);
  return out;
}

Vec CollisionOperator::q(const Vec& g, const Vec& h) const { return project_micro(q_raw(g, h)); }

LinearizedOperator linearize(const CollisionOperator& op, const Vec& a, bool conservative)
{
  const auto& space = op.space();
  const auto& g = space.grid();
  const auto& sph = g.sphere;
  const auto& ker = op.kernel();
  const int n = g.size();
  LinearizedOperator L;
  L.base_state = a;
  L.multiplicative_part = op.nu(a);
  Mat K = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec3 rel = g.nodes[i] - g.nodes[j];
      double r = rel.norm();
      // Loss term a(xi) nu_h(xi).
      K(i, j) -= a(i) * g.weights(j) * ker.total(r);
      if (r == 0.0) continue;
      Vec3 G = 0.5 * (g.nodes[i] + g.nodes[j]);
      Vec3 ghat = rel / r;
      for (size_t k = 0; k < sph.nodes.size(); ++k) {
        const Vec3& sg = sph.nodes[k];
        Stencil sp = trilinear(g, G + 0.5 * r * sg);
        if (sp.count == 0) continue;
        Stencil ss = trilinear(g, G - 0.5 * r * sg);
        if (ss.count == 0) continue;
        double c = g.weights(j) * sph.w[k] * ker.b(r, ghat.dot(sg));
        double ap = c * sp.apply(a);
        double as = c * ss.apply(a);
        for (int t = 0; t < ss.count; ++t) K(i, ss.idx[t]) += ap * ss.w[t];
        for (int t = 0; t < sp.count; ++t) K(i, sp.idx[t]) += as * sp.w[t];
      }
    }
  }
  L.compact_part = std::move(K);
  L.matrix = L.compact_part;
  L.matrix.diagonal() -= L.multiplicative_part;
  if (conservative) {
    for (int c = 0; c < n; ++c) L.matrix.col(c) = op.project_micro(L.matrix.col(c));
    L.compact_part = L.matrix;
    L.compact_part.diagonal() += L.multiplicative_part;
  }
  return L;
}

Mat symmetrized(const VelocitySpace& space, const Mat& L)
{
  Vec d = space.weight(0.5).cwiseSqrt();
  return d.asDiagonal() * L * d.cwiseInverse().asDiagonal();
}

double symmetry_defect(const VelocitySpace& space, const Mat& L)
{
  Mat S = symmetrized(space, L);
  return (S - S.transpose()).norm() / std::max(S.norm(), 1e-300);
}

double weighted_operator_norm(const Mat& X, const Vec& w_in, const Vec& w_out, int iters)
{
  // Norm of D_out^{1/2} X D_in^{-1/2} in Euclidean coordinates.
  Vec so = w_out.cwiseSqrt();
  Vec si = w_in.cwiseSqrt().cwiseInverse();
  Mat Y = so.asDiagonal() * X * si.asDiagonal();
  if (Y.norm() == 0.0) return 0.0;
  Vec v = Vec::Ones(Y.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = Y.transpose() * (Y * v);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    sigma = std::sqrt(nw);
  }
  return sigma;
}

std::vector<NormRow> operator_norm_report(const CollisionOperator& op, double s, double s_prime, unsigned seed)
{
  require(s >= 0.5 && s < s_prime && s_prime < 1.0, ErrorKind::config, "operator_norm_report: need 1/2 <= s < s' < 1");
  const auto& space = op.space();
  const auto& g = space.grid();
  const int n = g.size();
  Vec jw(n);
  for (int i = 0; i < n; ++i) jw(i) = 1.0 / std::sqrt(japanese(g.nodes[i]));
  LinearizedOperator L = linearize(op, space.reference_maxwellian(), false);
  std::vector<NormRow> rows;
  Mat R = jw.asDiagonal() * L.matrix * jw.asDiagonal();
  rows.push_back({"rescaled_L_H12", weighted_operator_norm(R, space.weight(0.5), space.weight(0.5))});
  // Gain part of L at the reference: compact part plus the loss-compact term.
  Mat gain = L.compact_part;
  const Vec& m = space.reference_maxwellian();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gain(i, j) += m(i) * g.weights(j) * op.kernel().total((g.nodes[i] - g.nodes[j]).norm());
  rows.push_back({"gain_Hs_to_Hsprime", weighted_operator_norm(jw.asDiagonal() * gain, space.weight(s), space.weight(s_prime))});
  // Sampled bilinear constant for <xi>^{-1/2} Q on H^{1/2} x H^{1/2}.
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  double best = 0.0;
  Vec mh = m.cwiseSqrt();
  for (int k = 0; k < 6; ++k) {
    Vec f(n), h(n);
    for (int i = 0; i < n; ++i) {
      f(i) = m(i) * (1.0 + 0.3 * nd(rng) * g.nodes[i](k % 3));
      h(i) = m(i) * (1.0 + 0.3 * nd(rng));
    }
    Vec qv = jw.cwiseProduct(op.q_raw(f, h));
    double ratio = space.weighted_norm(qv, 0.5) / (space.weighted_norm(f, 0.5) * space.weighted_norm(h, 0.5));
    best = std::max(best, ratio);
  }
  rows.push_back({"bilinear_rescaled_Q_H12_sampled", best});
  return rows;
}

}  // namespace kshock
