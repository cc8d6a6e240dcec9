#include "kshock/velocity_space.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

namespace kshock {

FluidState FluidState::from_primitive(double rho, const Vec3& v, double e)
{
  FluidState u;
  u.rho = rho;
  u.momentum = rho * v;
  u.total_energy = rho * (e + 0.5 * v.squaredNorm());
  return u;
}

FluidState FluidState::from_vec(const Vec5& u)
{
  FluidState s;
  s.rho = u(0);
  s.momentum = u.segment<3>(1);
  s.total_energy = u(4);
  return s;
}

Vec5 FluidState::vec() const
{
  Vec5 u;
  u << rho, momentum(0), momentum(1), momentum(2), total_energy;
  return u;
}

double FluidState::internal_energy() const
{
  Vec3 v = momentum / rho;
  return total_energy / rho - 0.5 * v.squaredNorm();
}

bool FluidState::valid() const
{
  return std::isfinite(rho) && rho > 0.0 && std::isfinite(total_energy) && internal_energy() > 0.0;
}

void FluidState::check() const
{
  require(rho > 0.0, ErrorKind::config, "invalid fluid state: density must be positive");
  require(internal_energy() > 0.0, ErrorKind::config, "invalid fluid state: internal energy must be positive");
}

double maxwellian_at(const FluidState& u, const Vec3& xi)
{
  const double e = u.internal_energy();
  const double s = 4.0 * e / 3.0;
  return u.rho / std::pow(pi * s, 1.5) * std::exp(-(xi - u.velocity()).squaredNorm() / s);
}

Vec5 psi(const Vec3& xi)
{
  Vec5 p;
  p << 1.0, xi(0), xi(1), xi(2), 0.5 * xi.squaredNorm();
  return p;
}

std::string QuadratureGrid::hash() const
{
  std::ostringstream os;
  os << std::setprecision(17) << "gl" << n_per_axis << "R" << truncation_radius << "S" << sphere.w.size();
  std::size_t h = std::hash<std::string>{}(os.str());
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

QuadratureGrid build_grid(int n_per_axis, double truncation_radius, int angular_order)
{
  require(n_per_axis >= 4, ErrorKind::config, "build_grid: n_per_axis must be at least 4");
  require(truncation_radius > 0.0, ErrorKind::config, "build_grid: truncation radius must be positive");
  require(angular_order >= 1, ErrorKind::config, "build_grid: angular order must be positive");
  QuadratureGrid g;
  g.n_per_axis = n_per_axis;
  g.truncation_radius = truncation_radius;
  // Gauss-Legendre in t, stretched by x = (R/a) erfinv(erf(a) t) so nodes cluster
  // where Maxwellians live; the endpoints t = +-1 map to +-R.
  Rule1D gl = gauss_legendre(n_per_axis);
  const double a = kGridStretch, ea = std::erf(a);
  for (int i = 0; i < n_per_axis; ++i) {
    double y = boost::math::erf_inv(ea * gl.x[i]);
    g.axis.push_back(truncation_radius / a * y);
    g.axis_w.push_back(truncation_radius / a * gl.w[i] * ea * 0.5 * std::sqrt(pi) * std::exp(y * y));
  }
  const int n = n_per_axis;
  g.nodes.reserve(n * n * n);
  g.weights.resize(n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        g.nodes.emplace_back(g.axis[i], g.axis[j], g.axis[k]);
        g.weights(g.index(i, j, k)) = g.axis_w[i] * g.axis_w[j] * g.axis_w[k];
      }
  g.sphere = sphere_product_rule(angular_order, 2 * angular_order);
  double acc = 0.0;
  for (int i = 0; i < g.size(); ++i) acc += g.weights(i) * std::exp(-g.nodes[i].squaredNorm());
  g.gaussian_error = std::abs(acc - std::pow(pi, 1.5));
  require(g.gaussian_error <= 1e-3, ErrorKind::config,
          "build_grid: quadrature of exp(-|xi|^2) off by " + std::to_string(g.gaussian_error));
  return g;
}

Vec maxwellian(const FluidState& u, const QuadratureGrid& grid)
{
  u.check();
  Vec m(grid.size());
  for (int i = 0; i < grid.size(); ++i) m(i) = maxwellian_at(u, grid.nodes[i]);
  return m;
}

Vec5 moments(const Vec& f, const QuadratureGrid& grid)
{
  Vec5 u = Vec5::Zero();
  for (int i = 0; i < grid.size(); ++i) u += grid.weights(i) * f(i) * psi(grid.nodes[i]);
  return u;
}

VelocitySpace::VelocitySpace(QuadratureGrid grid, const FluidState& reference)
    : grid_(std::move(grid))
    , ref_(reference)
    , mref_(maxwellian(reference, grid_))
{
}

Vec VelocitySpace::weight(double s) const
{
  require(s > 0.0 && s <= 1.0, ErrorKind::config, "weight s must lie in (0,1]");
  return grid_.weights.cwiseProduct(mref_.array().pow(-2.0 * s).matrix());
}

double VelocitySpace::weighted_norm(const Vec& f, double s, double lambda) const
{
  require(lambda >= 0.0, ErrorKind::config, "lambda must be nonnegative");
  double a = f.cwiseAbs2().dot(weight(s));
  if (lambda > 0.0) a += lambda * f.cwiseAbs2().dot(weight(0.5));
  return std::sqrt(a);
}

double VelocitySpace::inner(const Vec& f, const Vec& g, double s) const { return f.cwiseProduct(g).dot(weight(s)); }

void write_distribution_csv(const std::string& path, const QuadratureGrid& grid, const Vec& f)
{
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorKind::config, "cannot open " + path);
  os << "xi1,xi2,xi3,value\n" << std::setprecision(17);
  for (int i = 0; i < grid.size(); ++i) {
    const Vec3& x = grid.nodes[i];
    os << x(0) << ',' << x(1) << ',' << x(2) << ',' << f(i) << '\n';
  }
}

}  // namespace kshock
