#pragma once

// Independent reference computations used only by tests. None of these share
// code paths with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace uplift::oracle {

using RowMajor = std::vector<std::vector<double>>;

/// Solves A x = b by Gaussian elimination with partial pivoting, in long double.
inline std::vector<long double> gauss_solve(std::vector<std::vector<long double>> A,
                                            std::vector<long double> b) {
  const std::size_t p = b.size();
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < p; ++i) {
      if (std::fabs(A[i][k]) > std::fabs(A[piv][k])) piv = i;
    }
    if (A[piv][k] == 0.0L) throw std::runtime_error("gauss_solve: singular system");
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < p; ++i) {
      const long double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < p; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<long double> x(p);
  for (std::size_t k = p; k-- > 0;) {
    long double s = b[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= A[k][j] * x[j];
    x[k] = s / A[k][k];
  }
  return x;
}

/// Least squares through the normal equations (X^T X) b = X^T y, formed and
/// solved in long double, followed by iterative refinement on the normal
/// equations.
inline std::vector<double> normal_equations_ols(const RowMajor& X, const std::vector<double>& y) {
  const std::size_t n = X.size();
  const std::size_t p = n ? X[0].size() : 0;
  std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0.0L));
  std::vector<long double> xty(p, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += static_cast<long double>(X[i][a]) * y[i];
      for (std::size_t b = 0; b < p; ++b) {
        xtx[a][b] += static_cast<long double>(X[i][a]) * X[i][b];
      }
    }
  }
  auto beta = gauss_solve(xtx, xty);
  for (int round = 0; round < 3; ++round) {
    std::vector<long double> resid(p);
    for (std::size_t a = 0; a < p; ++a) {
      long double s = xty[a];
      for (std::size_t b = 0; b < p; ++b) s -= xtx[a][b] * beta[b];
      resid[a] = s;
    }
    const auto corr = gauss_solve(xtx, resid);
    for (std::size_t a = 0; a < p; ++a) beta[a] += corr[a];
  }
  return {beta.begin(), beta.end()};
}

/// 2-norm condition number of X from the eigenvalues of X^T X (cyclic Jacobi,
/// long double).
inline double condition_number(const RowMajor& X) {
  const std::size_t n = X.size();
  const std::size_t p = n ? X[0].size() : 0;
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r][c] += static_cast<long double>(X[i][r]) * X[i][c];
    }
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0.0L;
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = r + 1; c < p; ++c) off += a[r][c] * a[r][c];
    }
    if (off < 1e-36L) break;
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = r + 1; c < p; ++c) {
        if (a[r][c] == 0.0L) continue;
        const long double theta = (a[c][c] - a[r][r]) / (2.0L * a[r][c]);
        const long double t = (theta >= 0 ? 1.0L : -1.0L) /
                              (std::fabs(theta) + std::sqrt(theta * theta + 1.0L));
        const long double cs = 1.0L / std::sqrt(t * t + 1.0L);
        const long double sn = t * cs;
        for (std::size_t k = 0; k < p; ++k) {
          const long double akr = a[k][r];
          const long double akc = a[k][c];
          a[k][r] = cs * akr - sn * akc;
          a[k][c] = sn * akr + cs * akc;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const long double ark = a[r][k];
          const long double ack = a[c][k];
          a[r][k] = cs * ark - sn * ack;
          a[c][k] = sn * ark + cs * ack;
        }
      }
    }
  }
  long double lo = a[0][0];
  long double hi = a[0][0];
  for (std::size_t k = 1; k < p; ++k) {
    lo = std::min(lo, a[k][k]);
    hi = std::max(hi, a[k][k]);
  }
  if (lo <= 0.0L) return INFINITY;
  return static_cast<double>(std::sqrt(hi / lo));
}

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-14, int depth = 0) {
  static constexpr double xk[8] = {0.991455371120812639206854697526329,
                                   0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926,
                                   0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013,
                                   0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245,
                                   0.000000000000000000000000000000000};
  static constexpr double wk[8] = {0.022935322010529224963732008058970,
                                   0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518,
                                   0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550,
                                   0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649,
                                   0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082,
                                   0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975,
                                   0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = wk[7] * f(c);
  double gauss = wg[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double fx1 = f(c - h * xk[i]);
    const double fx2 = f(c + h * xk[i]);
    kron += wk[i] * (fx1 + fx2);
    if (i % 2 == 1) gauss += wg[i / 2] * (fx1 + fx2);
  }
  kron *= h;
  gauss *= h;
  if (std::fabs(kron - gauss) <= tol || depth > 40) return kron;
  return integrate(f, a, c, tol / 2, depth + 1) + integrate(f, c, b, tol / 2, depth + 1);
}

/// Student-t density.
inline double t_density(double x, double nu) {
  const double logc = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                      0.5 * std::log(nu * std::numbers::pi);
  return std::exp(logc - (nu + 1.0) / 2.0 * std::log1p(x * x / nu));
}

/// Two-sided tail probability by integrating the density over [0, |t|].
inline double t_pvalue_by_quadrature(double t, double nu) {
  const double at = std::fabs(t);
  if (at == 0.0) return 1.0;
  // Split at 1 so the peak region gets its own adaptive panel.
  double mass = 0.0;
  const auto f = [nu](double x) { return t_density(x, nu); };
  if (at <= 1.0) {
    mass = integrate(f, 0.0, at);
  } else {
    mass = integrate(f, 0.0, 1.0) + integrate(f, 1.0, at);
  }
  return 1.0 - 2.0 * mass;
}

/// Central trimming by explicit order statistics.
inline std::vector<double> brute_trim(const std::vector<double>& values, double mass) {
  std::vector<double> s = values;
  std::sort(s.begin(), s.end());
  auto q = [&](double level) {
    const double pos = level * static_cast<double>(s.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= s.size()) return s.back();
    return s[i] + (pos - static_cast<double>(i)) * (s[i + 1] - s[i]);
  };
  const double lo = q((1.0 - mass) / 2.0);
  const double hi = q(1.0 - (1.0 - mass) / 2.0);
  std::vector<double> out;
  for (double v : values) {
    if (v >= lo && v <= hi) out.push_back(v);
  }
  return out;
}

}  // namespace uplift::oracle
