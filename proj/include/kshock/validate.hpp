#pragma once

#include "kshock/reduced.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace kshock {

struct AssumptionCheck
{
  std::string id;
  std::string description;
  bool pass = false;
  double value = 0.0;     // the measured quantity behind the verdict
  std::string witness;    // offending component, eigenvalue or vector when failing
};

struct AssumptionReport
{
  std::string system;
  std::vector<AssumptionCheck> checks;

  bool all_pass() const;
  const AssumptionCheck& get(const std::string& id) const;
  nlohmann::json to_json() const;
};

struct ValidateOptions
{
  double tol = 1e-10;         // relative tolerance for structural identities
  double kernel_tol = 1e-8;   // rank threshold for b*
  double slow_ratio = 0.1;    // |alpha| / next |eigenvalue| at u0
  double probe = 0.05;        // relative size of the probe step away from u0
};

// Checks the structural hypotheses on the system at its reference state:
//   splitting   A symmetric, Q(U) in V
//   kernel      L vanishes on U and maps into V
//   negativity  sym(L) negative definite on V in the system metric
//   coupling    Kawashima compensator exists with gamma > 0
//   reduced     dh* real semisimple, b* with nonnegative real spectrum
//   no_kernel_eigenvector  no eigenvector of dh* in ker b*
//   left_kernel ker b*^T constant between u0 and a probe state
//   slow_field  simple eigenvalue of dh* near zero
//   nonlinear   grad(alpha) . r != 0
AssumptionReport validate(const RelaxationSystem& sys, const ValidateOptions& opt = {});

}  // namespace kshock
