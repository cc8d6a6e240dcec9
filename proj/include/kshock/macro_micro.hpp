#pragma once

#include "kshock/collision.hpp"
#include "kshock/galerkin.hpp"
#include "kshock/relaxation.hpp"

#include <string>
#include <vector>

namespace kshock {

// chi_0 = 1, chi_k = z_k, chi_4 = (|z|^2 - 3)/sqrt(6), z = (xi - v)/sqrt(T) at the reference.
Vec5 chi(const FluidState& reference, const Vec3& xi);

struct EquilibriumBasis
{
  Mat phi;      // N x 5 nodal chi_j M_ref after the discrete touch-up (H^{1/2}-orthonormal)
  Mat phi_raw;  // N x 5 nodal chi_j M_ref
  Mat gram;     // 5 x 5 H^{1/2} Gram of phi_raw

  // max_{i != j} |gram_ij| / sqrt(gram_ii gram_jj)
  double off_diagonal() const;
};
EquilibriumBasis build_basis(const VelocitySpace& space);

// H^{1/2}-orthogonal splitting f = P_U f + P_V f on the nodal grid.
class Projectors
{
 public:
  Projectors(const VelocitySpace& space, const EquilibriumBasis& basis);

  Vec macro(const Vec& f) const;
  Vec micro(const Vec& f) const { return f - macro(f); }
  Mat macro_matrix() const;
  Mat micro_matrix() const;
  int rank() const { return static_cast<int>(phi_.cols()); }

 private:
  Mat phi_;
  Vec w_;
};

// A finite-dimensional picture of the tilde H^s inner product: Gram of the
// inner product, Gram of the <xi>-weighted inner product, and coordinate
// columns spanning the macro and micro parts.
struct FormSpace
{
  double s = 0.5;
  double lambda = 0.0;
  Mat gram;
  Mat metric;
  Mat macro;
  Mat micro;
};

// Galerkin coordinates: H^{1/2} is the identity and U is the first five coordinates.
FormSpace galerkin_space(const GalerkinSystem& g, double s, double lambda);
// Nodal grid: diagonal weights; V is spanned by the P_V images of unit vectors.
FormSpace nodal_space(const VelocitySpace& space, const EquilibriumBasis& basis, double s, double lambda);

struct CoercivityReport
{
  double s = 0.5;
  double lambda = 0.0;
  double delta = 0.0;            // min over V of -Re<Lf,f> / |<xi>^{1/2} f|^2
  Vec minimizer;                 // coordinates of the minimizing f
  double kernel_quotient = 0.0;  // max |quotient| over the macro columns
};
CoercivityReport coercivity_gap(const Mat& L, const FormSpace& X);

// Hard-sphere collision frequency 2 pi int |xi - eta| M(eta) d eta in closed form.
double collision_frequency(const FluidState& u, const Vec3& xi);

// Weight selection for s > 1/2: delta1 = (1/2) inf nu0 / <xi>, C the smallest
// constant with delta1 |<xi>^{1/2} f|_s^2 <= -Re(Lf,f)_s + C |f|_s^2, delta0 the
// s = 1/2 gap, and lambda the least value with
// C M^{-2s} <= (1/2) <xi> (delta1 M^{-2s} + lambda delta0 M^{-1}) for all xi.
struct LambdaRule
{
  double s = 0.5;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double C = 0.0;
  double lambda = 0.0;
};
LambdaRule lambda_rule(const GalerkinSystem& g, double s);

// Coercivity at weight s with the lambda rule applied.
CoercivityReport weighted_coercivity(const GalerkinSystem& g, double s);

// Finite-rank compensator theta (K11 + K12 + K21) in coordinates orthonormal
// for the working inner product with U the first n coordinates.
struct Compensator
{
  int n = 0;
  double theta = 0.0;
  Mat K11, K12, K21;  // full m x m blocks
  double coupling = 0.0;  // min over A11 eigenspaces of the least singular value of A21 restricted there
  double gamma = 0.0;     // min Rayleigh quotient of Re(KA - L) against the <xi> metric
  std::vector<std::pair<double, double>> sweep;  // (theta, gamma)

  Mat K() const { return theta * (K11 + K12 + K21); }
};

// gamma(theta) = min eig of (sym(theta (K11+K12+K21) A - L), W).
double kawashima_gamma(const Compensator& c, const Mat& A, const Mat& L, const Mat& W, double theta);

// Builds the blocks, checks genuine coupling, and chooses theta as the largest
// theta <= 1 with gamma(theta) >= gamma_max / 2 over an 8-point log sweep.
// Throws an assumption error naming the offending A11 eigenvector if coupling fails.
Compensator build_compensator(const Mat& A, const Mat& L, const Mat& W, int n);
Compensator build_compensator(const RelaxationSystem& sys);

// Re P_U K A P_U restricted to U (theta = 1).
Mat macro_block(const Compensator& c, const Mat& A);

}  // namespace kshock
