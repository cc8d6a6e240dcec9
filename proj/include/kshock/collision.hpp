#pragma once

#include "kshock/velocity_space.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace kshock {

struct CollisionGeometry
{
  Vec3 xi, xi_star, omega, xi_prime, xi_star_prime;
};

// Post-collision velocities for the impact direction omega.
CollisionGeometry collide(const Vec3& xi, const Vec3& xi_star, const Vec3& omega);

// Kernel in the sigma-representation: int C(Omega, g) F dOmega = int b(|g|, cos) F dsigma.
class CollisionKernel
{
 public:
  virtual ~CollisionKernel() = default;
  virtual std::string id() const = 0;
  virtual double b(double rel_speed, double cos_angle) const = 0;
  // nu kernel: int b(|g|, .) dsigma.
  virtual double total(double rel_speed) const = 0;
};

// C(Omega, g) = |Omega . g|, so b = |g|/2 and the total is 2 pi |g|.
class HardSphereKernel : public CollisionKernel
{
 public:
  std::string id() const override { return "hard_sphere"; }
  double b(double rel_speed, double) const override { return 0.5 * rel_speed; }
  double total(double rel_speed) const override { return 2.0 * pi * rel_speed; }
};

// Trilinear interpolation stencil on the tensor grid; empty outside the node hull.
struct Stencil
{
  std::array<int, 8> idx{};
  std::array<double, 8> w{};
  int count = 0;
  double apply(const Vec& f) const
  {
    double s = 0.0;
    for (int i = 0; i < count; ++i) s += w[i] * f(idx[i]);
    return s;
  }
};
Stencil trilinear(const QuadratureGrid& grid, const Vec3& x);

class CollisionOperator
{
 public:
  explicit CollisionOperator(const VelocitySpace& space,
                             std::shared_ptr<const CollisionKernel> kernel = std::make_shared<HardSphereKernel>());

  const VelocitySpace& space() const { return space_; }
  const CollisionKernel& kernel() const { return *kernel_; }

  Vec nu(const Vec& h) const;
  Vec q_gain(const Vec& g, const Vec& h) const;
  // Q = Q+ - Q- as discretized, without conservative correction.
  Vec q_raw(const Vec& g, const Vec& h) const;
  // Q followed by the H^{1/2}-orthogonal projection onto V = ker R.
  Vec q(const Vec& g, const Vec& h) const;
  // f - P_U f with P_U the H^{1/2}-orthogonal projector onto span{psi M_ref}.
  Vec project_micro(const Vec& f) const;

 private:
  const VelocitySpace& space_;
  std::shared_ptr<const CollisionKernel> kernel_;
  Mat5 psi_gram_inv_;
};

struct LinearizedOperator
{
  Mat matrix;                // -diag(nu0) + compact_part
  Vec multiplicative_part;  // nu0
  Mat compact_part;
  Vec base_state;
};

// L_a h = Q(a,h) + Q(h,a), assembled directly from interpolation stencils.
// With conservative = true the result is premultiplied by the micro projector.
LinearizedOperator linearize(const CollisionOperator& op, const Vec& a, bool conservative = true);

// Symmetric-coordinate version D^{1/2} L D^{-1/2} with D the H^{1/2} weight.
Mat symmetrized(const VelocitySpace& space, const Mat& L);
double symmetry_defect(const VelocitySpace& space, const Mat& L);

struct NormRow
{
  std::string name;
  double value;
};
// Operator norms under mixed weights: <xi>^{-1/2} L <xi>^{-1/2} on H^{1/2},
// the gain part of L from H^s to H^{s'}, and a sampled bilinear bound.
std::vector<NormRow> operator_norm_report(const CollisionOperator& op, double s, double s_prime, unsigned seed = 7);

// Largest singular value of the operator X between diagonal weighted spaces
// (weights w_in, w_out), by power iteration.
double weighted_operator_norm(const Mat& X, const Vec& w_in, const Vec& w_out, int iters = 200);

}  // namespace kshock
