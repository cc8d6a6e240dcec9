#pragma once

#include "kshock/linear_solver.hpp"

#include <vector>

namespace kshock {

struct FixedPointOptions
{
  double tol = 1e-10;  // step size in H^2_{eps,delta}
  int max_iter = 40;
  double delta = 0.0;
  int divergence_window = 3;  // consecutive contraction factors >= 1
  bool viscous = false;       // solve each iterate through the eta -> 0 viscous limit
  Profile initial;            // empty: start from zero
  Mat metric;                 // Gram for the norms; empty: the system metric
};

struct FixedPointResult
{
  Profile U;  // corrector
  Profile f;  // U_NS + U
  std::vector<double> steps;    // |U_{k+1} - U_k| in H^2_{eps,delta}
  std::vector<double> factors;  // steps[k] / steps[k-1]
  double first_norm = 0.0;      // |T(0)|
  double corrector_norm = 0.0;  // |U|
  double ball_radius = 0.0;     // eps^{3/2}
  double phase = 0.0;           // |l . u(0)| of the corrector
  int iterations = 0;
  bool converged = false;
  KineticResidual residual;
};

// Micro source of one iterate: -R + avg(M U + B(U, U)) on intervals.
Profile iteration_source(const RelaxationSystem& sys, const ApproximateProfile& prof, const Profile& U);

FixedPointResult iterate(const RelaxationSystem& sys, const ApproximateProfile& prof, const ProfileOperator& op,
                         const FixedPointOptions& opt = {});

// H^2_{eps,delta} norm in the working metric of the system.
double profile_norm(const RelaxationSystem& sys, const ApproximateProfile& prof, const Profile& U, double delta,
                    int k = 2);

// Standing wave A U' = Q(U) integrated from the left endstate along its
// unstable direction (one micro dimension), aligned so that
// phase . u(0) = level, and sampled on x.
struct ShootingOptions
{
  double tol = 1e-13;
  double offset = 1e-9;  // initial distance from the endstate, relative to |U+ - U-|
};
Profile shoot_profile(const RelaxationSystem& sys, const Vec& U_minus, const Vec& U_plus, const Vec& phase,
                      double level, const Vec& x, const ShootingOptions& opt = {});

// Shift s minimizing max_i |a(x_i) - b(x_i + s)| over nodes where both are defined;
// b(x) = a(x - s0) gives s = s0.
struct TranslationFit
{
  double shift = 0.0;
  double distance = 0.0;
};
TranslationFit translation_normalize(const Vec& x, const Profile& a, const Profile& b, double max_shift = -1.0);

// Cubic (Catmull-Rom) interpolation of a nodal profile at y.
Vec interpolate(const Vec& x, const Profile& a, double y);

// (4 fine - coarse) / 3 on the coarse nodes; fine has 2N - 1 nodes.
Profile richardson(const Profile& coarse, const Profile& fine);

// Least-squares slope of log(value) against log(eps).
double fit_order(const std::vector<double>& eps, const std::vector<double>& value);

}  // namespace kshock
