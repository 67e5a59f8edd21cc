#pragma once

#include <vector>

namespace dswgan {

// Regularized lower incomplete gamma P(a, x), series below a+1 and
// continued fraction above.
double gamma_p(double a, double x);

// Inverse of gamma_p in x: Newton from a Wilson-Hilferty start with a
// bisection safeguard, iterated to 1e-10 absolute tolerance.
double gamma_p_inv(double a, double u);

// Standard normal CDF and its inverse (Acklam's rational approximation
// polished by one Newton step).
double normal_cdf(double z);
double normal_quantile(double u);

// Type-7 (linear interpolation) empirical quantile of an ascending-sorted
// sample.
double quantile_type7_sorted(const std::vector<double>& sorted, double q);
// Convenience: copies and sorts.
double quantile_type7(std::vector<double> sample, double q);

}  // namespace dswgan
