#include "kshock/galerkin.hpp"

#include "kshock/cache.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace kshock {

namespace {

void hermite_1d(double z, int d, double* h)
{
  h[0] = 1.0;
  if (d >= 1) h[1] = z;
  for (int k = 1; k < d; ++k) h[k + 1] = (z * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) / std::sqrt(k + 1.0);
}

struct Tensor3Rule
{
  std::vector<Vec3> y;
  std::vector<double> w;
};

Tensor3Rule hermite_cube(int m)
{
  Rule1D gh = gauss_hermite(m);
  Tensor3Rule r;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        r.y.emplace_back(gh.x[i], gh.x[j], gh.x[k]);
        r.w.push_back(gh.w[i] * gh.w[j] * gh.w[k]);
      }
  return r;
}

// E_y[F(y) h_a(y/sqrt(beta)) h_b(y/sqrt(beta))] for y standard normal.
template <class F>
Mat hermite_gram(const HermiteBasis& basis, int m, double beta, F&& f)
{
  const int n = basis.size();
  Tensor3Rule r = hermite_cube(m);
  const int np = static_cast<int>(r.y.size());
  Mat H(np, n);
  Vec w(np);
  std::vector<double> buf(n);
  for (int i = 0; i < np; ++i) {
    Vec3 z = r.y[i] / std::sqrt(beta);
    basis.eval_z(z, buf.data());
    for (int a = 0; a < n; ++a) H(i, a) = buf[a];
    w(i) = r.w[i] * f(z);
  }
  Mat G = H.transpose() * w.asDiagonal() * H;
  return 0.5 * (G + G.transpose());
}

}  // namespace

HermiteBasis::HermiteBasis(int degree, const FluidState& reference)
    : degree_(degree)
    , ref_(reference)
{
  require(degree >= 2 && degree <= 12, ErrorKind::config, "Hermite basis degree must lie in [2, 12]");
  ref_.check();
  std::map<std::array<int, 3>, int> where;
  for (int k = 0; k <= degree; ++k)
    for (int a = k; a >= 0; --a)
      for (int b = k - a; b >= 0; --b) {
        std::array<int, 3> al{a, b, k - a - b};
        where[al] = static_cast<int>(mi_.size());
        mi_.push_back(al);
      }
  auto idx = [&](int a, int b, int c) { return where.at({a, b, c}); };
  auto add = [&](std::vector<std::pair<int, double>> t, int d) {
    terms_.push_back(std::move(t));
    deg_.push_back(d);
  };
  add({{idx(0, 0, 0), 1.0}}, 0);
  add({{idx(1, 0, 0), 1.0}}, 1);
  add({{idx(0, 1, 0), 1.0}}, 1);
  add({{idx(0, 0, 1), 1.0}}, 1);
  const double r3 = 1.0 / std::sqrt(3.0), r2 = 1.0 / std::sqrt(2.0), r6 = 1.0 / std::sqrt(6.0);
  int a1 = idx(2, 0, 0), a2 = idx(0, 2, 0), a3 = idx(0, 0, 2);
  add({{a1, r3}, {a2, r3}, {a3, r3}}, 2);
  add({{a1, r2}, {a2, -r2}}, 2);
  add({{a1, r6}, {a2, r6}, {a3, -2.0 * r6}}, 2);
  add({{idx(1, 1, 0), 1.0}}, 2);
  add({{idx(1, 0, 1), 1.0}}, 2);
  add({{idx(0, 1, 1), 1.0}}, 2);
  for (size_t i = 0; i < mi_.size(); ++i) {
    int d = mi_[i][0] + mi_[i][1] + mi_[i][2];
    if (d >= 3) add({{static_cast<int>(i), 1.0}}, d);
  }
  rot_ = Mat::Zero(size(), static_cast<int>(mi_.size()));
  for (int a = 0; a < size(); ++a)
    for (auto [i, c] : terms_[a]) rot_(a, i) = c;
}

int HermiteBasis::size_at_degree(int k) const
{
  return static_cast<int>(std::count_if(deg_.begin(), deg_.end(), [k](int d) { return d <= k; }));
}

void HermiteBasis::hermite_values(const Vec3& z, double* out) const
{
  double h[3][32];
  for (int i = 0; i < 3; ++i) hermite_1d(z(i), degree_, h[i]);
  for (size_t k = 0; k < mi_.size(); ++k) out[k] = h[0][mi_[k][0]] * h[1][mi_[k][1]] * h[2][mi_[k][2]];
}

void HermiteBasis::eval_z(const Vec3& z, double* out) const
{
  double hv[1024];
  hermite_values(z, hv);
  for (int a = 0; a < size(); ++a) {
    double s = 0.0;
    for (auto [i, c] : terms_[a]) s += c * hv[i];
    out[a] = s;
  }
}

Vec HermiteBasis::eval(const Vec3& xi) const
{
  Vec out(size());
  Vec3 z = (xi - ref_.velocity()) / std::sqrt(ref_.temperature());
  eval_z(z, out.data());
  return out / std::sqrt(ref_.rho);
}

AssemblyRules exact_rules(int d)
{
  AssemblyRules r;
  r.center = (3 * d + 2) / 2;
  r.radial = (3 * d + 3) / 2;
  int p = (3 * d + 2) / 2;
  r.polar = p + (p % 2);
  r.azimuth = 3 * d + 1 + ((3 * d + 1) % 2);
  r.sigma_polar = (d + 2) / 2;
  r.sigma_azimuth = d + 1 + ((d + 1) % 2);
  return r;
}

Mat collision_tensor(const HermiteBasis& basis, const CollisionKernel& kernel, const AssemblyRules& rules)
{
  require(rules.polar % 2 == 0 && rules.azimuth % 2 == 0, ErrorKind::config,
          "collision tensor: relative-direction rule must be antipodally symmetric");
  const int n = basis.size();
  const double rho = basis.reference().rho, temp = basis.reference().temperature();
  std::ostringstream key;
  key << "ctensor_" << kernel.id() << "_d" << basis.degree() << "_" << rules.center << rules.radial << rules.polar << '_'
      << rules.azimuth << rules.sigma_polar << rules.sigma_azimuth;
  std::ostringstream rs;
  rs << std::setprecision(17) << rho << ',' << temp;
  nlohmann::json meta = {{"kind", "collision_tensor"}, {"kernel", kernel.id()}, {"degree", basis.degree()},
                         {"reference", rs.str()},     {"rules", {rules.center, rules.radial, rules.polar, rules.azimuth, rules.sigma_polar, rules.sigma_azimuth}}};
  key << '_' << std::hex << std::hash<std::string>{}(meta.dump());
  if (auto cached = load_matrix(key.str(), meta)) return *cached;

  Tensor3Rule cm = hermite_cube(rules.center);
  Rule1D rad = gauss_radial_t2(rules.radial);
  SphereRule full = sphere_product_rule(rules.polar, rules.azimuth);
  SphereRule half;
  for (size_t k = 0; k < full.nodes.size(); ++k)
    if (full.nodes[k](2) > 0.0) {
      half.nodes.push_back(full.nodes[k]);
      half.w.push_back(full.w[k]);
    }
  SphereRule sig = sphere_product_rule(rules.sigma_polar, rules.sigma_azimuth);
  const double pref = 0.5 * std::sqrt(rho) * std::pow(pi, -1.5);
  const double gscale = 2.0 * std::sqrt(temp);

  const int chunk = 512;
  Mat T = Mat::Zero(n * n, n);
  Mat X(chunk, n * n);
  Mat D(chunk, n);
  int fill = 0;
  std::vector<double> pa(n), pb(n), pp(n), pm(n);
  auto flush = [&]() {
    if (fill == 0) return;
    T.noalias() += X.topRows(fill).transpose() * D.topRows(fill);
    fill = 0;
  };
  const double sqrt2 = std::sqrt(2.0);
  for (size_t iy = 0; iy < cm.y.size(); ++iy) {
    Vec3 zg = cm.y[iy] / sqrt2;
    for (size_t it = 0; it < rad.x.size(); ++it) {
      const double t = rad.x[it];
      const double g = gscale * t;
      const double tot = kernel.total(g);
      for (size_t ig = 0; ig < half.nodes.size(); ++ig) {
        const Vec3& gh = half.nodes[ig];
        basis.eval_z(zg + t * gh, pa.data());
        basis.eval_z(zg - t * gh, pb.data());
        const double w = pref * cm.w[iy] * rad.w[it] * half.w[ig];
        for (int c = 0; c < n; ++c) D(fill, c) = -tot * (pa[c] + pb[c]);
        for (size_t is = 0; is < sig.nodes.size(); ++is) {
          const Vec3& s = sig.nodes[is];
          const double bw = sig.w[is] * kernel.b(g, gh.dot(s));
          basis.eval_z(zg + t * s, pp.data());
          basis.eval_z(zg - t * s, pm.data());
          for (int c = 0; c < n; ++c) D(fill, c) += bw * (pp[c] + pm[c]);
        }
        for (int c = 0; c < n; ++c) D(fill, c) *= w;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) X(fill, a * n + b) = pa[a] * pb[b];
        if (++fill == chunk) flush();
      }
    }
  }
  flush();
  // The dropped half of the relative directions is the (a,b) swap.
  Mat S(n * n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) S.row(a * n + b) = T.row(a * n + b) + T.row(b * n + a);
  save_matrix(key.str(), S, meta);
  return S;
}

Vec GalerkinSystem::q(const Vec& U, const Vec& V) const
{
  const int n = size();
  Mat outer = V * U.transpose();
  return T.transpose() * Eigen::Map<const Vec>(outer.data(), n * n);
}

Mat GalerkinSystem::dq(const Vec& U) const
{
  const int n = size();
  Mat M = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    if (U(a) != 0.0) M += U(a) * T.middleRows(a * n, n);
  return 2.0 * M.transpose();
}

namespace {

double hs_factor(const FluidState& ref, double beta)
{
  const double t = ref.temperature();
  return std::pow(ref.rho, beta - 1.0) * std::pow(2 * pi * t, -1.5 * beta) * std::pow(t, 1.5) * std::pow(2 * pi / beta, 1.5);
}

}  // namespace

Mat GalerkinSystem::gram_s(double s) const
{
  require(s > 0.0 && s < 1.0, ErrorKind::config, "Galerkin H^s Gram needs 0 < s < 1");
  const double beta = 2.0 - 2.0 * s;
  return hs_factor(basis.reference(), beta) * hermite_gram(basis, basis.degree() + 1, beta, [](const Vec3&) { return 1.0; });
}

Mat GalerkinSystem::japanese_gram_s(double s) const
{
  require(s > 0.0 && s < 1.0, ErrorKind::config, "Galerkin H^s Gram needs 0 < s < 1");
  const double beta = 2.0 - 2.0 * s;
  const FluidState& ref = basis.reference();
  const Vec3 v = ref.velocity();
  const double st = std::sqrt(ref.temperature());
  return hs_factor(ref, beta) *
         hermite_gram(basis, basis.degree() + 40, beta, [&](const Vec3& z) { return japanese(v + st * z); });
}

Vec GalerkinSystem::maxwellian_coefficients(const FluidState& u) const
{
  u.check();
  Tensor3Rule r = hermite_cube(basis.degree() + 1);
  const Vec3 v = u.velocity();
  const double st = std::sqrt(u.temperature());
  Vec c = Vec::Zero(size());
  for (size_t i = 0; i < r.y.size(); ++i) c += r.w[i] * basis.eval(v + st * r.y[i]);
  return u.rho * c;
}

double GalerkinSystem::nodal_value(const Vec& c, const Vec3& xi) const
{
  return basis.eval(xi).dot(c) * maxwellian_at(basis.reference(), xi);
}

Vec GalerkinSystem::nodal(const Vec& c, const QuadratureGrid& grid) const
{
  Vec f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f(i) = nodal_value(c, grid.nodes[i]);
  return f;
}

GalerkinSystem GalerkinSystem::truncated(int degree) const
{
  require(degree >= 2 && degree <= basis.degree(), ErrorKind::config, "Galerkin truncation degree out of range");
  HermiteBasis b(degree, basis.reference());
  const int m = b.size(), n = size();
  Mat Tm(m * m, m);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) Tm.row(a * m + c) = T.row(a * n + c).head(m);
  return GalerkinSystem{b, A.topLeftCorner(m, m), Tm, W.topLeftCorner(m, m), moment.leftCols(m), reference.head(m)};
}

GalerkinSystem build_galerkin(int degree, const FluidState& reference, const CollisionKernel& kernel)
{
  HermiteBasis basis(degree, reference);
  const int n = basis.size();
  const int nh = static_cast<int>(basis.hermite_indices().size());
  const Vec3 v = reference.velocity();
  const double st = std::sqrt(reference.temperature());
  // z_1 h_alpha = sqrt(alpha_1 + 1) h_{alpha+e1} + sqrt(alpha_1) h_{alpha-e1}, truncated.
  Mat Z = Mat::Zero(nh, nh);
  const auto& mi = basis.hermite_indices();
  for (int i = 0; i < nh; ++i)
    for (int j = 0; j < nh; ++j)
      if (mi[i][1] == mi[j][1] && mi[i][2] == mi[j][2] && std::abs(mi[i][0] - mi[j][0]) == 1)
        Z(i, j) = std::sqrt(static_cast<double>(std::max(mi[i][0], mi[j][0])));
  const Mat& R = basis.rotation();
  GalerkinSystem sys{basis, Mat(), Mat(), Mat(), Mat(), Vec()};
  sys.A = v(0) * Mat::Identity(n, n) + st * R * Z * R.transpose();
  sys.T = collision_tensor(basis, kernel, exact_rules(degree));
  sys.W = hermite_gram(basis, degree + 50, 1.0, [&](const Vec3& z) { return japanese(v + st * z); });
  Tensor3Rule r = hermite_cube(degree + 2);
  sys.moment = Mat::Zero(5, n);
  for (size_t i = 0; i < r.y.size(); ++i) {
    Vec3 xi = v + st * r.y[i];
    sys.moment += r.w[i] * reference.rho * psi(xi) * basis.eval(xi).transpose();
  }
  sys.reference = Vec::Zero(n);
  sys.reference(0) = std::sqrt(reference.rho);
  return sys;
}

Mat GalerkinLadder::projector(int i) const
{
  const int n = top.size();
  Mat P = Mat::Zero(n, n);
  P.topLeftCorner(sizes[i], sizes[i]).setIdentity();
  return P;
}

GalerkinLadder build_ladder(const FluidState& reference, const std::vector<int>& degrees, const CollisionKernel& kernel)
{
  require(!degrees.empty() && std::is_sorted(degrees.begin(), degrees.end()) && degrees.front() >= 2, ErrorKind::config,
          "ladder degrees must be ascending and at least 2");
  GalerkinLadder L{degrees, {}, build_galerkin(degrees.back(), reference, kernel)};
  for (int d : degrees) L.sizes.push_back(L.top.basis.size_at_degree(d));
  return L;
}

}  // namespace kshock
