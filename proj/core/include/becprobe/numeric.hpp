#pragma once

#include "becprobe/types.hpp"

namespace becprobe::numeric {

// e^z - 1 without cancellation for small |z|.
cplx expm1(cplx z);

// (e^z - 1) / z, analytic at z = 0.
cplx phi1(cplx z);

// (e^z - 1 - z) / z^2, analytic at z = 0.
cplx phi2(cplx z);

double log_factorial(int n);

// Probability mass of Poisson(mean) strictly above n_max.
double poisson_tail(double mean, int n_max);

// Stirling number of the second kind S(r, j).
double stirling2(int r, int j);

// Touchard polynomial T_r(x) = sum_j S(r, j) x^j, the r-th raw moment of Poisson(x).
double touchard(int r, double x);

}  // namespace becprobe::numeric
