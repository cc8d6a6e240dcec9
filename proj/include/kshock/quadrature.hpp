#pragma once

#include "kshock/common.hpp"

#include <vector>

namespace kshock {

struct Rule1D
{
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre on [-1,1].
Rule1D gauss_legendre(int n);

// Probabilists' Gauss-Hermite: weight exp(-x^2/2)/sqrt(2 pi), weights sum to 1.
Rule1D gauss_hermite(int n);

// Gauss rule with n nodes for the discrete measure (x_i, w_i), via Stieltjes
// recurrence and Golub-Welsch. The measure must have at least n support points.
Rule1D gauss_from_measure(const std::vector<double>& x, const std::vector<double>& w, int n);

// Gauss rule for weight t^2 exp(-t^2) on [0, inf).
Rule1D gauss_radial_t2(int n);

struct SphereRule
{
  std::vector<Vec3> nodes;
  std::vector<double> w;  // sums to 4 pi
};

// Product rule: Gauss in cos(polar) with n_polar points, uniform azimuth with
// n_azimuth points. Exact for spherical polynomials of degree
// min(2 n_polar - 1, n_azimuth - 1).
SphereRule sphere_product_rule(int n_polar, int n_azimuth);

}  // namespace kshock
