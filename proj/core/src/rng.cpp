#include "uplift/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "math_detail.hpp"

namespace uplift {

double uniform01(Xoshiro256& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(Xoshiro256& rng) {
  double u1 = uniform01(rng);
  while (u1 == 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::int64_t poisson_knuth(Xoshiro256& rng, double mean) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double prod = uniform01(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform01(rng);
  }
  return k;
}

// Hoermann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS.
std::int64_t poisson_ptrs(Xoshiro256& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - detail::log_gamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

std::int64_t poisson(Xoshiro256& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::domain_error("poisson: bad mean");
  if (mean == 0.0) return 0;
  return mean < 30.0 ? poisson_knuth(rng, mean) : poisson_ptrs(rng, mean);
}

std::int64_t binomial(Xoshiro256& rng, std::int64_t n, double p) {
  std::int64_t k = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (uniform01(rng) < p) ++k;
  }
  return k;
}

std::int64_t stochastic_round(Xoshiro256& rng, double x) {
  const double base = std::floor(x);
  const double frac = x - base;
  auto out = static_cast<std::int64_t>(base);
  if (frac > 0.0 && uniform01(rng) < frac) ++out;
  return out;
}

}  // namespace uplift
