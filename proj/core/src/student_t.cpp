#include "uplift/student_t.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "math_detail.hpp"

namespace uplift {

namespace {

using detail::log_gamma;

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

void check_dof(long dof) {
  if (dof < 1) throw InvalidDof("degrees of freedom must be >= 1, got " + std::to_string(dof));
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete_beta: a and b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_pvalue(double t, long dof) {
  check_dof(dof);
  if (std::isnan(t)) throw std::domain_error("t_pvalue: t is NaN");
  if (std::isinf(t)) return 0.0;
  const double nu = static_cast<double>(dof);
  // P(|T| >= |t|) = I_{nu/(nu+t^2)}(nu/2, 1/2)
  const double t2 = t * t;
  const double x = nu / (nu + t2);
  double p;
  if (x < 0.5) {
    p = incomplete_beta(0.5 * nu, 0.5, x);
  } else {
    // 1 - x computed without cancellation
    p = 1.0 - incomplete_beta(0.5, 0.5 * nu, t2 / (nu + t2));
  }
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

double t_upper_tail(double t, long dof) {
  const double half = 0.5 * t_pvalue(t, dof);
  return t >= 0.0 ? half : 1.0 - half;
}

double t_quantile(double prob, long dof) {
  check_dof(dof);
  if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("t_quantile: prob outside (0, 1)");
  if (prob == 0.5) return 0.0;
  // Solve upper_tail(t) = 1 - prob by bracketing then bisection.
  const double target = prob > 0.5 ? 1.0 - prob : prob;
  double lo = 0.0;
  double hi = 1.0;
  while (t_upper_tail(hi, dof) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (t_upper_tail(mid, dof) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double q = 0.5 * (lo + hi);
  return prob > 0.5 ? q : -q;
}

}  // namespace uplift
