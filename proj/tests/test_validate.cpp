#include "kshock/validate.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace kshock;
using namespace kshock::testing;

TEST_CASE("validate: synthetic defaults and the Boltzmann Galerkin system pass")
{
  for (const auto& sys : {make_jin_xin(1.0, 1.0, 1.0), sonic_broadwell()}) {
    AssumptionReport rep = validate(sys);
    CHECK(rep.all_pass());
    CHECK(rep.to_json()["pass"] == true);
  }
  const FluidState ref = FluidState::from_primitive(1.0, Vec3(std::sqrt(5.0 / 6.0), 0.0, 0.0), 0.75);
  AssumptionReport rep = validate(from_galerkin(build_galerkin(3, ref)));
  for (const auto& c : rep.checks) {
    INFO(c.id << " " << c.witness);
    CHECK(c.pass);
  }
  // Mass has no viscosity: a one-dimensional constant left kernel.
  CHECK(rep.get("left_kernel").value <= 1e-10);
}

TEST_CASE("validate is deterministic")
{
  const auto sys = sonic_broadwell();
  CHECK(validate(sys).to_json().dump() == validate(sys).to_json().dump());
}

TEST_CASE("validate: collision map leaking into the macro space names the component")
{
  RelaxationSystem sys = sonic_broadwell();
  sys.Q.C(1, 2) = 0.3;
  AssumptionReport rep = validate(sys);
  CHECK_FALSE(rep.all_pass());
  const auto& c = rep.get("splitting.range");
  CHECK_FALSE(c.pass);
  CHECK(c.witness.find("component 1") != std::string::npos);
}

TEST_CASE("validate: identity transport on the macro space breaks genuine coupling")
{
  RelaxationSystem sys = sonic_broadwell();
  sys.A.topLeftCorner(2, 2) = Mat::Identity(2, 2);
  AssumptionReport rep = validate(sys);
  const auto& c = rep.get("coupling");
  CHECK_FALSE(c.pass);
  CHECK(c.witness.find("eigenvalue 1") != std::string::npos);
  // The witness direction lies in ker A21.
  const Mat A21 = sys.A.bottomLeftCorner(1, 2);
  CHECK(c.witness.find("lies in ker A21") != std::string::npos);
  CHECK(std::abs(A21(0, 0)) <= 1e-14);
}

TEST_CASE("validate: zero collision operator fails negativity")
{
  RelaxationSystem sys = sonic_broadwell();
  sys.Q.T.setZero();
  sys.Q.C.setZero();
  sys.Q.d.setZero();
  AssumptionReport rep = validate(sys);
  CHECK_FALSE(rep.get("negativity").pass);
  CHECK_FALSE(rep.get("slow_field").pass);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("validate: a linear closure is not genuinely nonlinear")
{
  // Jin-Xin with gamma -> tiny has an almost linear equilibrium flux.
  AssumptionReport rep = validate(make_jin_xin(1.0, 1.0, 1e-9));
  CHECK_FALSE(rep.get("nonlinear").pass);
}
