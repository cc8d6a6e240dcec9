#pragma once

#include "kshock/relaxation.hpp"

#include <memory>

namespace kshock {

struct FluxPoint
{
  Vec h;
  Mat dh;
  Mat b;
};

// Reduced viscous conservation law h(u)' = (b(u) u')' on R^n.
class ReducedFlux
{
 public:
  virtual ~ReducedFlux() = default;
  virtual int dim() const = 0;
  virtual Vec h(const Vec& u) const = 0;
  virtual Mat dh(const Vec& u) const = 0;
  virtual Mat b(const Vec& u) const = 0;
  virtual Vec base() const = 0;
  virtual FluxPoint point(const Vec& u) const { return {h(u), dh(u), b(u)}; }
};

struct SlowField
{
  double alpha = 0.0;
  double ratio = 0.0;  // |alpha| / next smallest |eigenvalue|
  Vec r;               // right eigenvector, oriented so that grad(alpha).r < 0
  Vec l;               // left eigenvector with l.r = 1
  Vec grad_alpha;
  double grad_alpha_r = 0.0;
};

// Eigenvalue of dh of minimal modulus at u, with vectors; orientation from grad alpha.
SlowField slow_field(const ReducedFlux& flux, const Vec& u, double fd_step = 1e-5);

// Orthonormal basis (columns) of the left kernel of b, relative threshold tol.
Mat left_kernel(const Mat& b, double tol = 1e-8);

// Chapman-Enskog data at one macro state.
struct CEPoint
{
  Vec v;   // v*(u)
  Mat dv;  // dv*(u)
  Mat c;   // c*(u)
  Mat b;   // b*(u)
  Vec h;   // h*(u)
  Mat dh;  // dh*(u)
};

class ReducedSystem : public ReducedFlux
{
 public:
  explicit ReducedSystem(RelaxationSystem sys, NewtonOptions opt = {});

  const RelaxationSystem& system() const { return sys_; }
  int dim() const override { return sys_.n; }
  Vec base() const override { return sys_.reference.head(sys_.n); }

  Vec v_star(const Vec& u) const;
  CEPoint at(const Vec& u) const;
  Vec h(const Vec& u) const override;
  Mat dh(const Vec& u) const override { return at(u).dh; }
  Mat b(const Vec& u) const override { return at(u).b; }
  FluxPoint point(const Vec& u) const override;

  // Relative discrepancies of the analytic Jacobians against central differences.
  struct FDCheck
  {
    double dv = 0.0;
    double dh = 0.0;
    double ift = 0.0;  // |dv* + (d_v q)^{-1} d_u q|
  };
  FDCheck fd_check(const Vec& u, double step = 1e-5) const;

 private:
  RelaxationSystem sys_;
  NewtonOptions opt_;
  Vec v0_;
};

// u = S w: h~(w) = S^{-1} h(S w), b~(w) = S^{-1} b(S w) S.
class LinearChange : public ReducedFlux
{
 public:
  LinearChange(std::shared_ptr<const ReducedFlux> inner, Mat S);
  int dim() const override { return inner_->dim(); }
  Vec h(const Vec& w) const override;
  Mat dh(const Vec& w) const override;
  Mat b(const Vec& w) const override;
  Vec base() const override;
  const Mat& S() const { return S_; }

 private:
  std::shared_ptr<const ReducedFlux> inner_;
  Mat S_;
  Eigen::PartialPivLU<Mat> lu_;
};

}  // namespace kshock
