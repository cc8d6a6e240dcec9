#include "kshock/validate.hpp"

#include "kshock/macro_micro.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kshock {

namespace {

std::string format(const Vec& v)
{
  std::ostringstream s;
  s.precision(6);
  s << '(';
  for (int i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v(i);
  s << ')';
  return s.str();
}

AssumptionCheck make(const std::string& id, const std::string& what, bool pass, double value, std::string witness = {})
{
  return {id, what, pass, value, pass ? std::string() : std::move(witness)};
}

// Runs a check that may throw; a thrown Error becomes a failing check with its message as witness.
template <class F>
AssumptionCheck guarded(const std::string& id, const std::string& what, F&& f)
{
  try {
    return f();
  } catch (const Error& e) {
    return make(id, what, false, std::nan(""), e.what());
  }
}

}  // namespace

bool AssumptionReport::all_pass() const
{
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
}

const AssumptionCheck& AssumptionReport::get(const std::string& id) const
{
  for (const auto& c : checks)
    if (c.id == id) return c;
  fail(ErrorKind::config, "no assumption check named " + id);
}

nlohmann::json AssumptionReport::to_json() const
{
  nlohmann::json j;
  j["system"] = system;
  j["pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e{{"id", c.id}, {"description", c.description}, {"pass", c.pass}};
    e["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    if (!c.witness.empty()) e["witness"] = c.witness;
    j["checks"].push_back(e);
  }
  return j;
}

AssumptionReport validate(const RelaxationSystem& sys, const ValidateOptions& opt)
{
  sys.check();
  const int n = sys.n, r = sys.r, m = sys.m();
  AssumptionReport rep;
  rep.system = sys.name;
  auto& out = rep.checks;

  {
    const double asym = (sys.A - sys.A.transpose()).norm() / std::max(1.0, sys.A.norm());
    out.push_back(make("splitting.symmetric", "transport matrix is symmetric", asym <= opt.tol, asym,
                       "asymmetry " + std::to_string(asym)));
  }
  {
    // Q(U) = B[U,U] + C U + d lies in V iff the macro rows of T, C and d vanish.
    double worst = 0.0;
    int comp = -1;
    const double scale = std::max({1.0, sys.Q.T.norm(), sys.Q.C.norm(), sys.Q.d.norm()});
    for (int i = 0; i < n; ++i) {
      const double row = sys.Q.C.row(i).norm() + std::abs(sys.Q.d(i)) + sys.Q.T.col(i).norm();
      if (row > worst) {
        worst = row;
        comp = i;
      }
    }
    out.push_back(make("splitting.range", "collision map takes values in the micro space", worst <= opt.tol * scale,
                       worst / scale, "macro component " + std::to_string(comp) + " of Q is nonzero"));
  }
  const Mat L = sys.L();
  {
    const double lu = L.leftCols(n).norm() / std::max(1.0, L.norm());
    out.push_back(make("kernel.macro", "linearized operator vanishes on the macro space", lu <= opt.tol, lu,
                       "|L restricted to U| = " + std::to_string(lu)));
  }
  out.push_back(guarded("negativity", "linearized operator is negative definite on V", [&] {
    Mat S = -L.bottomRightCorner(r, r);
    S = (0.5 * (S + S.transpose())).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(S, sys.metric.bottomRightCorner(r, r));
    require(es.info() == Eigen::Success, ErrorKind::solver, "negativity eigensolve failed");
    const double d = es.eigenvalues()(0);
    Vec w = Vec::Zero(m);
    w.tail(r) = es.eigenvectors().col(0);
    return make("negativity", "linearized operator is negative definite on V", d > opt.tol, d,
                "eigenvalue " + std::to_string(-d) + " on " + format(w));
  }));
  out.push_back(guarded("coupling", "Kawashima compensator with gamma > 0", [&] {
    Compensator c = build_compensator(sys);
    return make("coupling", "Kawashima compensator with gamma > 0", c.gamma > 0.0, c.gamma,
                "gamma " + std::to_string(c.gamma));
  }));

  // Reduced-system hypotheses need the equilibrium map.
  std::shared_ptr<ReducedSystem> red;
  AssumptionCheck eq = guarded("equilibrium", "equilibrium map v*(u) exists at the reference", [&] {
    red = std::make_shared<ReducedSystem>(sys);
    return make("equilibrium", "equilibrium map v*(u) exists at the reference", true, 0.0);
  });
  out.push_back(eq);
  const std::vector<std::string> reduced_ids{"reduced.hyperbolic", "reduced.viscosity", "no_kernel_eigenvector",
                                             "left_kernel", "slow_field", "nonlinear"};
  if (!red) {
    for (const auto& id : reduced_ids) out.push_back(make(id, "needs the equilibrium map", false, std::nan(""), eq.witness));
    return rep;
  }
  const Vec u0 = red->base();
  out.push_back(guarded("reduced.hyperbolic", "dh* has real semisimple spectrum", [&] {
    const Mat J = red->dh(u0);
    Eigen::EigenSolver<Mat> es(J);
    const double imag = es.eigenvalues().imag().cwiseAbs().maxCoeff() / std::max(1.0, J.norm());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
    const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    const bool ok = imag <= opt.kernel_tol && cond < 1e8;
    return make("reduced.hyperbolic", "dh* has real semisimple spectrum", ok, cond,
                "max |Im| " + std::to_string(imag) + ", eigenvector condition " + std::to_string(cond));
  }));
  out.push_back(guarded("reduced.viscosity", "b* has nonnegative real spectrum", [&] {
    const Mat b = red->b(u0);
    Eigen::EigenSolver<Mat> es(b);
    const double scale = std::max(1e-300, b.norm());
    const double re = es.eigenvalues().real().minCoeff() / scale;
    const double imag = es.eigenvalues().imag().cwiseAbs().maxCoeff() / scale;
    const bool ok = re >= -opt.kernel_tol && imag <= opt.kernel_tol && b.norm() > 0.0;
    return make("reduced.viscosity", "b* has nonnegative real spectrum", ok, re,
                "min Re " + std::to_string(re) + ", max |Im| " + std::to_string(imag));
  }));
  out.push_back(guarded("no_kernel_eigenvector", "no eigenvector of dh* lies in ker b*", [&] {
    const Mat J = red->dh(u0), b = red->b(u0);
    Eigen::EigenSolver<Mat> es(J);
    double worst = 1e300;
    Vec witness;
    for (int k = 0; k < n; ++k) {
      const Vec v = es.eigenvectors().col(k).real().normalized();
      const double q = (b * v).norm() / b.norm();
      if (q < worst) {
        worst = q;
        witness = v;
      }
    }
    return make("no_kernel_eigenvector", "no eigenvector of dh* lies in ker b*", worst > opt.kernel_tol, worst,
                "eigenvector " + format(witness));
  }));
  out.push_back(guarded("left_kernel", "left kernel of b* is constant", [&] {
    const SlowField sf = slow_field(*red, u0);
    const Vec u1 = u0 + opt.probe * (1.0 + u0.norm()) * sf.r;
    const Mat K0 = left_kernel(red->b(u0), opt.kernel_tol);
    const Mat K1 = left_kernel(red->b(u1), opt.kernel_tol);
    double d = 0.0;
    if (K0.cols() != K1.cols())
      d = 1.0;
    else if (K0.cols() > 0)
      d = (K0 * K0.transpose() - K1 * K1.transpose()).norm();
    return make("left_kernel", "left kernel of b* is constant", d <= 1e-6, d,
                "kernel dimensions " + std::to_string(K0.cols()) + " and " + std::to_string(K1.cols()) +
                    ", projector distance " + std::to_string(d));
  }));
  SlowField sf;
  out.push_back(guarded("slow_field", "simple eigenvalue of dh* near zero", [&] {
    sf = slow_field(*red, u0);
    return make("slow_field", "simple eigenvalue of dh* near zero", sf.ratio <= opt.slow_ratio, sf.ratio,
                "alpha " + std::to_string(sf.alpha) + ", ratio " + std::to_string(sf.ratio));
  }));
  out.push_back(guarded("nonlinear", "slow field is genuinely nonlinear", [&] {
    sf = slow_field(*red, u0);
    const double g = std::abs(sf.grad_alpha_r) / std::max(1.0, sf.grad_alpha.norm());
    return make("nonlinear", "slow field is genuinely nonlinear", g > 1e-6, sf.grad_alpha_r,
                "grad(alpha) . r = " + std::to_string(sf.grad_alpha_r) + " along " + format(sf.r));
  }));
  return rep;
}

}  // namespace kshock
