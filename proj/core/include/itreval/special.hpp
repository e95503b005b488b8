#pragma once

namespace itreval {

// Regularized incomplete beta I_x(a, b). For a <= 0 returns the Heaviside
// step H(x) = 1{x > 0}. Throws InputError for x outside [0, 1] or b <= 0.
double reg_inc_beta(double x, double a, double b);

double normal_quantile(double p);
double normal_cdf(double x);

}  // namespace itreval
