#pragma once

#include "kshock/reduced.hpp"

#include <vector>

namespace kshock {

struct ShockSpec
{
  Vec u_minus;
  Vec u_plus;
  double epsilon = 0.0;
  Vec direction;  // r(u0), oriented so that grad(alpha).r < 0
  double rh_residual = 0.0;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
};

// Standing (zero-speed) shock of amplitude epsilon on the slow Hugoniot
// branch: u- = anchor + tau r and u+ solve h(u+) = h(u-), |u+ - u-| = epsilon.
// The default anchor is u0 - (epsilon/2) r.
ShockSpec hugoniot_connect(const ReducedFlux& flux, const SlowField& slow, double epsilon, const Vec* anchor = nullptr,
                           double tol = 1e-13, int max_iter = 40);

struct NSOptions
{
  int nodes = 601;           // odd, the centre node carries the phase condition
  double half_length = 0.0;  // 0 selects 12 / theta_hat
  double tol = 1e-12;
  int max_iter = 40;
  double kernel_tol = 1e-8;
  int phase_node_offset = 0;  // phase condition at centre + offset
};

// Asymptotic modes of the linearized reduced pencil at an endstate: the
// algebraic rows Lk dh w = 0 leave w = Z c with c' = E c.
struct EndstatePencil
{
  Mat Z;
  Mat E;
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};
EndstatePencil reduced_pencil(const ReducedFlux& flux, const Vec& u, const Mat& Lk, const Mat& Y);

// Rows that annihilate the modes selected by kill (one or two real rows per
// eigenvalue, real and imaginary parts for complex pairs), in terms of Z^T w.
Mat killing_rows(const Eigen::VectorXcd& ev, const Eigen::MatrixXcd& X, const std::vector<bool>& kill);

struct NSProfile
{
  Vec x;
  std::vector<Vec> u;
  std::vector<Vec> du;  // nodal derivative from the reduced equation
  Vec u_minus, u_plus;
  double epsilon = 0.0;
  double theta_hat = 0.0;
  double mu_minus = 0.0, mu_plus = 0.0;
  double half_length = 0.0;
  Vec phase;  // unit phase vector
  int center = 0;
  int iterations = 0;
  double residual = 0.0;     // max residual of the discrete reduced equation
  double endpoint_gap = 0.0; // max(|u(-L) - u-|, |u(L) - u+|)
  Mat Lk;                    // left kernel of b* (rows)
  Mat Y;                     // complementary rows

  int size() const { return static_cast<int>(x.size()); }
  double h() const { return x(1) - x(0); }
  Vec mid() const { return 0.5 * (u_minus + u_plus); }
};

NSProfile solve_ns_profile(const ReducedFlux& flux, const ShockSpec& spec, const Vec& phase, const NSOptions& opt = {});

// Exponential decay fit of |u(x) - u+-| on |x| in [0.2 L, 0.8 L]: returns the
// smaller of the two one-sided rates.
struct DecayFit
{
  double rate_left = 0.0;
  double rate_right = 0.0;
  double rate() const { return std::min(rate_left, rate_right); }
};
DecayFit fit_decay(const Vec& x, const std::vector<double>& dist_left, const std::vector<double>& dist_right,
                   double half_length);
DecayFit fit_profile_decay(const NSProfile& p);
double max_derivative(const NSProfile& p);

struct SlowModeData
{
  Vec mu;  // slow eigenvalue of the reduced pencil along the profile
  double mu_minus = 0.0, mu_plus = 0.0;
  double separation = 0.0;  // min |Re| of the other eigenvalues along the profile
  double m_decay_rate = 0.0;
};
SlowModeData slow_mode_data(const ReducedFlux& flux, const NSProfile& p);

// v_NS = v*(u) + c*(u) u' at every node.
std::vector<Vec> ns_v_correction(const ReducedSystem& red, const NSProfile& p, bool include_correction = true);

// Profile shifted by x0, by linear interpolation on the same grid.
std::vector<Vec> shift_profile(const Vec& x, const std::vector<Vec>& u, double x0);

}  // namespace kshock
