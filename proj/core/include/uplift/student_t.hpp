#pragma once

#include <stdexcept>

namespace uplift {

class InvalidDof : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1],
/// evaluated with Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value P(|T| >= |t|) for Student's t with `dof` degrees of
/// freedom. Small tails are computed directly, not as 1 - CDF, so values far
/// below machine epsilon keep their relative accuracy.
double t_pvalue(double t, long dof);

/// One-sided upper tail P(T >= t).
double t_upper_tail(double t, long dof);

/// Inverse of the CDF: the t with P(T <= t) == prob, for prob in (0, 1).
double t_quantile(double prob, long dof);

}  // namespace uplift
