#pragma once

#include <cmath>

namespace uplift::detail {

// std::lgamma writes the global signgam; the reentrant variant keeps
// concurrent callers race-free.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace uplift::detail
