#pragma once

namespace sobn {

// log of the Beta function.
double log_beta(double a, double b);

// Regularized incomplete beta function I_x(a, b): the Beta(a, b) CDF.
// Continued-fraction evaluation (modified Lentz), accurate to ~1e-14.
double reg_inc_beta(double a, double b, double x);

// Inverse of the Beta(a, b) CDF; bisection tightened by Newton steps.
double beta_quantile(double a, double b, double p);

}  // namespace sobn
