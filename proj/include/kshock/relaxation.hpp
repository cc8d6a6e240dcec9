#pragma once

#include "kshock/common.hpp"
#include "kshock/galerkin.hpp"

#include <string>
#include <vector>

namespace kshock {

// Quadratic collision map Q(U) = B[U,U] + C U + d on R^m. B is stored as a
// tensor with row a*m+b and column c, symmetric in (a,b).
struct QuadraticMap
{
  Mat T;
  Mat C;
  Vec d;

  int dim() const { return static_cast<int>(C.rows()); }
  Vec bilinear(const Vec& U, const Vec& V) const;
  Vec operator()(const Vec& U) const;
  // Differential V -> 2B[U,V] + C V.
  Mat jacobian(const Vec& U) const;
};

// Stationary relaxation system A U' = Q(U) on R^m = U (first n coordinates)
// plus V (last r coordinates), orthonormal splitting.
struct RelaxationSystem
{
  std::string name;
  int n = 0;
  int r = 0;
  Mat A;
  QuadraticMap Q;
  Vec reference;  // equilibrium state
  Mat metric;     // <xi> Gram in the working coordinates (identity if none)
  // Maps macro coordinates to fluid variables (identity for synthetic models).
  Mat fluid_map;

  int m() const { return n + r; }
  Mat A11() const { return A.topLeftCorner(n, n); }
  Mat A12() const { return A.topRightCorner(n, r); }
  Mat A21() const { return A.bottomLeftCorner(r, n); }
  Mat A22() const { return A.bottomRightCorner(r, r); }

  Vec join(const Vec& u, const Vec& v) const;
  Vec q(const Vec& u, const Vec& v) const;  // micro part of Q
  Mat dq(const Vec& u, const Vec& v) const;  // r x m micro rows of dQ
  Mat L() const { return Q.jacobian(reference); }

  void check() const;
};

struct NewtonOptions
{
  double tol = 1e-12;
  int max_iter = 50;
};

// v with q(u,v) = 0 by Newton from v0.
Vec solve_equilibrium(const RelaxationSystem& sys, const Vec& u, const Vec& v0, const NewtonOptions& opt = {});

// Galerkin truncation of the hard-sphere problem as a relaxation system.
RelaxationSystem from_galerkin(const GalerkinSystem& g);

// Jin-Xin-type scalar model: A = [[0,a],[a,0]], Q = (0, kappa (gamma u^2/2 - v)).
RelaxationSystem make_jin_xin(double a, double kappa, double gamma);

// Broadwell model in a frame moving at speed s, symmetrized around the
// equilibrium (f+, f-, f0) with f0^2 = f+ f-.
struct BroadwellModel
{
  double f_plus = 0.5;
  double f_minus = 0.3;
  double frame_speed = 0.0;
};
RelaxationSystem make_broadwell(const BroadwellModel& spec);
// Frame speed that makes the faster reduced characteristic vanish at the reference.
double broadwell_sonic_speed(double f_plus, double f_minus);
// Lab-frame densities (f+, f-, f0) of a state of make_broadwell.
Vec3 broadwell_densities(const BroadwellModel& spec, const Vec& U);

// Diagonal <xi>^{1/2} rescaling of a nodal transport operator.
struct NodalRescaling
{
  Vec sqrt_weight;  // <xi>^{1/2} per node
  Vec A_tilde;      // diagonal of <xi>^{-1/2} xi_1 <xi>^{-1/2}

  Vec to_tilde(const Vec& f) const { return sqrt_weight.cwiseProduct(f); }
  Vec from_tilde(const Vec& f) const { return f.cwiseQuotient(sqrt_weight); }
};
NodalRescaling rescale(const QuadratureGrid& grid);
// <xi>^{-1/2} Q(<xi>^{-1/2} f, <xi>^{-1/2} f).
Vec rescaled_q(const CollisionOperator& op, const NodalRescaling& s, const Vec& f_tilde);

}  // namespace kshock
