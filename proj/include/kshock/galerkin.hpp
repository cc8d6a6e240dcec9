#pragma once

#include "kshock/collision.hpp"
#include "kshock/velocity_space.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace kshock {

// Maxwellian-weighted tensor Hermite functions phi_a = p_a M_ref, total degree
// <= degree, orthonormal in H^{1/2}. The first five are the normalized
// equilibrium directions chi_0..chi_4 (the degree-2 diagonal block is rotated
// so that chi_4 = (|z|^2 - 3)/sqrt(6) comes first). Ordering is by degree, so
// every prefix of length size_at_degree(k) spans the degree-k subspace.
class HermiteBasis
{
 public:
  HermiteBasis(int degree, const FluidState& reference);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(terms_.size()); }
  int size_at_degree(int k) const;
  const FluidState& reference() const { return ref_; }
  int degree_of(int a) const { return deg_[a]; }

  // Values of the orthonormal Hermite products at standardized z = (xi - v)/sqrt(T).
  void hermite_values(const Vec3& z, double* out) const;
  // p_a at standardized z, without the 1/sqrt(rho) factor.
  void eval_z(const Vec3& z, double* out) const;
  // p_a(xi) including the 1/sqrt(rho) factor.
  Vec eval(const Vec3& xi) const;

  const std::vector<std::array<int, 3>>& hermite_indices() const { return mi_; }
  // Orthogonal map from Hermite-product coordinates to basis coordinates.
  const Mat& rotation() const { return rot_; }

 private:
  int degree_;
  FluidState ref_;
  std::vector<std::array<int, 3>> mi_;
  std::vector<std::vector<std::pair<int, double>>> terms_;
  std::vector<int> deg_;
  Mat rot_;
};

// Exact weak-form Galerkin operators of the hard-sphere problem on one basis.
struct GalerkinSystem
{
  HermiteBasis basis;
  Mat A;        // int xi_1 p_a p_b M_ref
  Mat T;        // collision tensor: row a*n+b, column c; symmetric in (a,b)
  Mat W;        // int <xi> p_a p_b M_ref
  Mat moment;   // 5 x n fluid moments of phi_a
  Vec reference;  // coefficients of M_ref

  int size() const { return basis.size(); }
  // Coefficients of Q(sum U_a phi_a, sum V_b phi_b).
  Vec q(const Vec& U, const Vec& V) const;
  // V -> Q(U,V) + Q(V,U).
  Mat dq(const Vec& U) const;
  // int M_ref^{2-2s} p_a p_b (H^s Gram), 0 < s < 1.
  Mat gram_s(double s) const;
  // int <xi> M_ref^{2-2s} p_a p_b.
  Mat japanese_gram_s(double s) const;
  Vec maxwellian_coefficients(const FluidState& u) const;
  // Nodal values of sum c_a phi_a.
  Vec nodal(const Vec& c, const QuadratureGrid& grid) const;
  double nodal_value(const Vec& c, const Vec3& xi) const;
  // Leading k-dimensional section (the Galerkin projection onto degree <= d).
  GalerkinSystem truncated(int degree) const;
};

struct AssemblyRules
{
  int center = 0;   // Gauss-Hermite points per axis for the centre of mass
  int radial = 0;   // Gauss points for t^2 e^{-t^2}
  int polar = 0;    // sphere rule for the relative direction
  int azimuth = 0;
  int sigma_polar = 0;
  int sigma_azimuth = 0;
};

// Smallest rules that integrate all polynomial integrands of the given degree exactly.
AssemblyRules exact_rules(int degree);

// Collision tensor of the kernel on the basis, using the weak form in
// centre-of-mass/relative coordinates. Cached via KINETIC_SHOCK_CACHE.
Mat collision_tensor(const HermiteBasis& basis, const CollisionKernel& kernel, const AssemblyRules& rules);

GalerkinSystem build_galerkin(int degree, const FluidState& reference,
                              const CollisionKernel& kernel = HardSphereKernel());

// Nested sequence of Galerkin truncations.
struct GalerkinLadder
{
  std::vector<int> degrees;
  std::vector<int> sizes;
  GalerkinSystem top;

  GalerkinSystem rank(int i) const { return top.truncated(degrees[i]); }
  // Orthogonal projector onto the first sizes[i] coordinates, in top coordinates.
  Mat projector(int i) const;
};

GalerkinLadder build_ladder(const FluidState& reference, const std::vector<int>& degrees,
                            const CollisionKernel& kernel = HardSphereKernel());

}  // namespace kshock
