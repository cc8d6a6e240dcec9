#pragma once

#include "kshock/collision.hpp"
#include "kshock/fixed_point.hpp"
#include "kshock/galerkin.hpp"

#include <vector>

namespace kshock {

// Per-epsilon measurements of a converged profile f against the NS profile and the endstates.
struct ProfileDiagnostics
{
  double epsilon = 0.0;
  double max_du = 0.0;   // max_x |u - u_NS| in fluid variables
  double attach0 = 0.0;  // max_x |f - f_pm| e^{delta eps |x|}
  double attach1 = 0.0;  // max_x |f' | e^{delta eps |x|}
  double decay_left = 0.0, decay_right = 0.0;  // fitted tail rates of |f - f_pm|
  double residual = 0.0;                       // box-form kinetic residual
};
ProfileDiagnostics diagnose(const ReducedSystem& red, const ApproximateProfile& prof, const Profile& f, double delta);

// Gaussian exponent, in units of 1/(2T), of the pointwise envelope that an H^s
// bound certifies: M_ref(xi) sqrt(p(xi)^T G_s^{-1} p(xi)) |c|_{G_s}, fitted
// against |xi - v|^2 on rays |xi - v| <= 2 sqrt(T). raw_exponent fits the
// largest |sum c_a phi_a| over a shell of directions instead.
struct LocalizationFit
{
  double s = 0.5;
  double exponent = 0.0;
  double raw_exponent = 0.0;
  double norm = 0.0;  // |c|_{G_s}
};
LocalizationFit localization(const GalerkinSystem& g, const Vec& c, double s);

// Nodal Boltzmann residual |xi_1 f_x - Q(f, f)|_{H^{1/2}} of a Galerkin
// profile at sampled x-nodes, against the nodal quadrature error
// |Q(M_u, M_u)|_{H^{1/2}} of the local Maxwellian at the same nodes.
struct NodalResidual
{
  double residual = 0.0;
  double quadrature_error = 0.0;
  std::vector<int> nodes;
};
NodalResidual nodal_kinetic_residual(const GalerkinSystem& g, const CollisionOperator& op, const Vec& x,
                                     const Profile& f, int samples);

}  // namespace kshock
