#pragma once

namespace distort {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of normal_cdf. Rational approximation polished with one Halley step;
// absolute error is at the few-ulp level across (0,1).
double normal_quantile(double p);

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
// Relative error <= 1e-12 for a,b > 0, x in [0,1].
double reg_inc_beta(double a, double b, double x);

// P(X <= x, Y <= y) for standard bivariate normal with correlation rho in
// (-1,1). Absolute error around 1e-12.
double bivariate_normal_cdf(double x, double y, double rho);

}  // namespace distort
