#pragma once

#include "kshock/common.hpp"
#include "kshock/quadrature.hpp"

#include <cmath>

#include <string>
#include <vector>

namespace kshock {

// Fluid variables u = (rho, rho v, rho E) with E = e + |v|^2/2.
struct FluidState
{
  double rho = 1.0;
  Vec3 momentum = Vec3::Zero();
  double total_energy = 0.75;

  static FluidState from_primitive(double rho, const Vec3& v, double e);
  static FluidState from_vec(const Vec5& u);

  Vec5 vec() const;
  Vec3 velocity() const { return momentum / rho; }
  double internal_energy() const;
  double temperature() const { return 2.0 * internal_energy() / 3.0; }
  double pressure() const { return rho * temperature(); }
  double sound_speed() const { return std::sqrt(5.0 * temperature() / 3.0); }
  bool valid() const;
  void check() const;
};

// Closed-form Maxwellian density at one velocity.
double maxwellian_at(const FluidState& u, const Vec3& xi);

// Collision invariants (1, xi, |xi|^2/2).
Vec5 psi(const Vec3& xi);

inline double japanese(const Vec3& xi) { return std::sqrt(1.0 + xi.squaredNorm()); }

struct QuadratureGrid
{
  int n_per_axis = 0;
  double truncation_radius = 0.0;
  std::vector<double> axis;    // 1-D nodes
  std::vector<double> axis_w;  // 1-D weights
  std::vector<Vec3> nodes;
  Vec weights;
  SphereRule sphere;
  double gaussian_error = 0.0;  // |quadrature of e^{-|xi|^2} - pi^{3/2}|

  int size() const { return static_cast<int>(nodes.size()); }
  int index(int i, int j, int k) const { return (i * n_per_axis + j) * n_per_axis + k; }
  std::string hash() const;
};

constexpr double kGridStretch = 2.0;

// Tensor grid of stretched Gauss-Legendre nodes on [-R,R]^3 plus a product sphere rule whose
// polar order is angular_order and azimuthal order 2*angular_order.
QuadratureGrid build_grid(int n_per_axis, double truncation_radius, int angular_order);

Vec maxwellian(const FluidState& u, const QuadratureGrid& grid);
Vec5 moments(const Vec& f, const QuadratureGrid& grid);

// A nodal function tagged with the ambient weight of H^s (tilde variant when lambda > 0).
struct DistributionVector
{
  Vec values;
  double weight_s = 0.5;
  double lambda = 0.0;
};

// Grid plus the fixed reference Maxwellian that defines every H^s weight.
class VelocitySpace
{
 public:
  VelocitySpace(QuadratureGrid grid, const FluidState& reference);

  const QuadratureGrid& grid() const { return grid_; }
  const FluidState& reference() const { return ref_; }
  const Vec& reference_maxwellian() const { return mref_; }

  // Diagonal of the discrete H^s inner product: w_i M^{-2s}(xi_i).
  Vec weight(double s) const;
  // Tilde norm squared: ||f||_{H^s}^2 + lambda ||f||_{H^{1/2}}^2.
  double weighted_norm(const Vec& f, double s, double lambda = 0.0) const;
  double weighted_norm(const DistributionVector& f) const { return weighted_norm(f.values, f.weight_s, f.lambda); }
  double inner(const Vec& f, const Vec& g, double s = 0.5) const;

 private:
  QuadratureGrid grid_;
  FluidState ref_;
  Vec mref_;
};

void write_distribution_csv(const std::string& path, const QuadratureGrid& grid, const Vec& f);

}  // namespace kshock
