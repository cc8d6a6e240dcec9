#pragma once

#include "kshock/linear_solver.hpp"

#include <algorithm>
#include <memory>

namespace kshock::testing {

inline RelaxationSystem sonic_broadwell()
{
  return make_broadwell({0.5, 0.3, broadwell_sonic_speed(0.5, 0.3)});
}

struct Setup
{
  std::shared_ptr<ReducedSystem> red;
  SlowField slow;
  ShockSpec spec;
  NSProfile ns;
  ApproximateProfile approx;
  std::unique_ptr<ProfileOperator> op;

  Setup(RelaxationSystem sys, double eps, int nodes = 601)
      : red(std::make_shared<ReducedSystem>(std::move(sys)))
  {
    slow = slow_field(*red, red->base());
    spec = hugoniot_connect(*red, slow, eps);
    NSOptions o;
    o.nodes = nodes;
    ns = solve_ns_profile(*red, spec, slow.l, o);
    approx = build_approximate(*red, ns);
    op = std::make_unique<ProfileOperator>(red->system(), approx, choose_phase_vector(slow));
  }
  const RelaxationSystem& sys() const { return red->system(); }
};

inline double max_diff(const Profile& a, const Profile& b)
{
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).lpNorm<Eigen::Infinity>());
  return d;
}

inline double max_abs(const Profile& a)
{
  double d = 0.0;
  for (const auto& v : a) d = std::max(d, v.lpNorm<Eigen::Infinity>());
  return d;
}

}  // namespace kshock::testing
