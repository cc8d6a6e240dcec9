#pragma once

#include "kshock/ns_profile.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <vector>

namespace kshock {

using Profile = std::vector<Vec>;

// Viscosities for the eta -> 0 extrapolation of the viscous path.
inline const std::vector<double> kViscosityLadder = {1e-2, 1e-3, 1e-4, 1e-5};

// Approximate kinetic profile U_NS = (u_NS, v_NS) with the data of the
// linearized problem around it.
struct ApproximateProfile
{
  Vec x;
  Profile u, v, U;
  std::vector<Mat> Qlin;  // r x m rows of dQ(u_NS, v*(u_NS))
  std::vector<Mat> M;     // r x m rows of dQ(U_NS) - dQ(u_NS, v*(u_NS))
  std::vector<Mat> p;     // -dv*(u_NS) per node
  Profile residual;       // R_v on intervals (box form)
  double row_one_defect = 0.0;  // max_i |A11 u + A12 v - h*(u-)|
  Vec u_minus, u_plus;
  Mat Q_minus, Q_plus;  // endstate rows of dQ
  Vec h_minus;
  double epsilon = 0.0;
  int center = 0;

  int size() const { return static_cast<int>(x.size()); }
  double h() const { return x(1) - x(0); }
};

ApproximateProfile build_approximate(const ReducedSystem& red, const NSProfile& ns, bool correction = true);

// Box residuals of the stationary kinetic equation: row one at nodes against
// the flux constant, row two on intervals.
struct KineticResidual
{
  double row_one = 0.0;
  double row_two = 0.0;
  Vec per_node;  // max of the adjacent residual norms
};
KineticResidual kinetic_residual(const RelaxationSystem& sys, const Vec& x, const Profile& U, const Vec& flux_constant);

// Sources of the linearized problem: f at nodes (macro), g on intervals (micro).
struct Sources
{
  Profile f;
  Profile g;
};

struct EndstateReport
{
  double eta = 0.0;
  Eigen::VectorXcd eig_minus, eig_plus;
  int stable_minus = 0, unstable_minus = 0, stable_plus = 0, unstable_plus = 0;
  int expected_stable_minus = 0, expected_stable_plus = 0;
  int expected_unstable_minus = 0, expected_unstable_plus = 0;
  double min_abs_re = 0.0;
  std::complex<double> slow_minus, slow_plus;
  bool dims_ok = false;
  bool balance_ok = false;  // dim S(A+) + dim U(A-) = 2r + n + 1
};

class ProfileOperator
{
 public:
  ProfileOperator(const RelaxationSystem& sys, const ApproximateProfile& prof, const Vec& phase);

  int nodes() const { return N_; }
  const Vec& phase() const { return phase_; }
  Sources apply(const Profile& U) const;
  // Bordered box solve with the phase condition l.u(0) = 0.
  Profile solve(const Sources& F) const;
  // Modified equation (row one - eta u', row two - eta v'') on the bordered stencil.
  Profile solve_viscous(const Sources& F, double eta) const;
  // First-order system (u, v, w = v') with dichotomy conditions from the endstate matrices.
  Profile solve_viscous_first_order(const Sources& F, double eta) const;
  // Lagrange extrapolation to eta = 0 from the given viscosities.
  Profile solve_viscous_limit(const Sources& F, const std::vector<double>& etas, bool first_order = false) const;
  EndstateReport endstate_spectrum(double eta, const Mat& dh_minus, const Mat& dh_plus) const;
  // Eigenvalues of the bordered endstate pencil (eta = 0).
  std::pair<Eigen::VectorXcd, Eigen::VectorXcd> pencil_spectrum() const;
  double relative_residual(const Profile& U, const Sources& F) const;
  int boundary_rows() const { return static_cast<int>(Bm_.rows() + Bp_.rows()); }
  // Lower bound on the condition number of the bordered matrix (inverse iteration).
  double condition_estimate() const;

 private:
  Mat end_matrix(double eta, const Mat& Q) const;
  void factor() const;

  Mat A_;
  int N_, n_, r_, m_, center_;
  double h_;
  Vec phase_;
  std::vector<Mat> Qlin_;
  Mat Qm_, Qp_;
  Mat Bm_, Bp_;  // boundary rows acting on U at the first and last node
  mutable std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  mutable double jnorm_ = 0.0;
  mutable double cond_ = 0.0;
};

// ||f||_{H^k_{eps,delta}} = eps^{1/2} sum_{j<=k} eps^{-j} ||e^{delta eps <x>} d^j f||_{L^2},
// derivatives by repeated differences; G is an optional Gram matrix for the values.
double weighted_norm(const Vec& x, const Profile& f, int k, double eps, double delta, const Mat* G = nullptr);

// Unit phase vector parallel to the left slow eigenvector of dh*(u0).
Vec choose_phase_vector(const SlowField& slow);

struct EstimateSample
{
  double epsilon = 0.0;
  double c_h2 = 0.0;       // eps ||U||_{H^2} / (||f||_{H^3} + ||g||_{H^2})
  double c_l2 = 0.0;       // (||U'|| + ||v~||) / (||(f,f',f'',g,g')|| + eps ||u||)
  double vtilde_ratio = 0.0;  // ||v~|| / (eps ||u||)
  double residual = 0.0;
  double phase = 0.0;
};

// Random smooth sources in the eps-scaled variable eps x.
Sources random_sources(const Vec& x, int n, int r, double eps, unsigned seed, bool with_f = true);
EstimateSample estimate_sample(const ProfileOperator& op, const ApproximateProfile& prof, const Sources& F,
                               double delta, const Mat* G = nullptr);

}  // namespace kshock
