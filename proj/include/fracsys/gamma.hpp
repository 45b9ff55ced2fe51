#pragma once

namespace fracsys {

// Lanczos (g = 7, 9 terms) with reflection for x < 1/2.
double gamma_fn(double x);
// log|Gamma(x)|
double lgamma_abs(double x);
// 1/Gamma(x); exact zero at the poles, no overflow for large x.
double rgamma(double x);
// sin(pi x) with argument reduction.
double sinpi(double x);

}  // namespace fracsys
