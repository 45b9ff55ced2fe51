#include "fracsys/gamma.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace fracsys {

namespace {

constexpr double kG = 7.0;
constexpr double kCoef[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Gamma(x) for x >= 1/2 as (series, base) pair: Gamma = sqrt(2pi) * base^(x-1/2) * e^-base * series
double lanczos_series(double x, double& base) {
  double z = x - 1.0;
  double a = kCoef[0];
  for (int i = 1; i < 9; ++i) a += kCoef[i] / (z + i);
  base = z + kG + 0.5;
  return a;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

double sinpi(double x) {
  double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r > 0.5) r = 1.0 - r;
  else if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

double gamma_fn(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  if (is_nonpositive_integer(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x < 0.5) return std::numbers::pi / (sinpi(x) * gamma_fn(1.0 - x));
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  if (x == std::floor(x) && x <= 23.0) {
    double f = 1.0;
    for (int i = 2; i < static_cast<int>(x); ++i) f *= i;
    return f;
  }
  double t;
  double a = lanczos_series(x, t);
  // split the power to delay overflow near the top of the range
  double p = std::pow(t, 0.5 * (x - 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * p * (p * std::exp(-t)) * a;
}

double lgamma_abs(double x) {
  if (is_nonpositive_integer(x)) return std::numeric_limits<double>::infinity();
  if (x < 0.5) return std::log(std::numbers::pi / std::fabs(sinpi(x))) - lgamma_abs(1.0 - x);
  if (x < 20.0) return std::log(std::fabs(gamma_fn(x)));
  double t;
  double a = lanczos_series(x, t);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x - 0.5) * std::log(t) - t + std::log(a);
}

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x < 0.5) return sinpi(x) * gamma_fn(1.0 - x) / std::numbers::pi;
  if (x < 170.0) return 1.0 / gamma_fn(x);
  return std::exp(-lgamma_abs(x));
}

}  // namespace fracsys
