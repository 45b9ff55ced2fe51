#pragma once

#include <functional>
#include <vector>

#include "fracsys/types.hpp"

namespace fracsys {

// Uniform samples t_i = i*h, i = 0..n-1, of f(t) = t^power * r(t).
// `values` holds r; power = 0 is the ordinary case, power in (-1, 0) marks an
// integrable endpoint singularity (the regular part r(0) is stored at t = 0).
struct SampledFunction {
  double h = 0.0;
  std::vector<cplx> values;
  double power = 0.0;

  SampledFunction() = default;
  SampledFunction(double step, std::vector<cplx> vals, double pw = 0.0);

  static SampledFunction from_grid(const std::vector<double>& grid, std::vector<cplx> vals,
                                   double pw = 0.0);
  static SampledFunction sample(const std::function<cplx(double)>& f, double h, std::size_t n);
  // samples r(t) = t^{-power} f(t), with r(0) supplied by the caller
  static SampledFunction sample_weighted(const std::function<cplx(double)>& regular, double h,
                                         std::size_t n, double power);

  std::size_t size() const { return values.size(); }
  double t(std::size_t i) const { return h * static_cast<double>(i); }
  std::vector<double> grid() const;
  // full value t^power r(t); infinite at t = 0 when power < 0
  cplx at(std::size_t i) const;
  std::vector<cplx> full() const;

  SampledFunction& operator*=(cplx c);
  SampledFunction& operator+=(const SampledFunction& o);
  SampledFunction& operator-=(const SampledFunction& o);
};

SampledFunction operator*(cplx c, SampledFunction f);
SampledFunction operator+(SampledFunction a, const SampledFunction& b);
SampledFunction operator-(SampledFunction a, const SampledFunction& b);

// same function stored against endpoint weight t^power; power must not exceed the
// current one unless the regular part vanishes at 0
SampledFunction reweight(const SampledFunction& a, double power);

// sup over grid indices [from, size) of |a - b| on full values
double sup_diff(const SampledFunction& a, const SampledFunction& b, std::size_t from = 0);

// (J^alpha f)(t) = 1/Gamma(alpha) int_0^t (t - s)^{alpha - 1} f(s) ds, product trapezoid
SampledFunction frac_integral(const SampledFunction& f, double alpha);

// L1 scheme, beta in (0,1); f must be regular
SampledFunction caputo_deriv(const SampledFunction& f, double beta);

// d/dt J^{1-beta} f by centred differences; the f(0) t^{-beta}/Gamma(1-beta)
// part is carried analytically in the weighted representation
SampledFunction rl_deriv(const SampledFunction& f, double beta);

// (f*g)(t) = int_0^t f(s) g(t - s) ds, product integration against the endpoint weights
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g);

struct LaplaceResult {
  cplx value;
  double error_estimate;
};

// int_0^inf e^{-st} f(t) dt by adaptive quadrature on [0, T_cut] plus a tail bound
LaplaceResult laplace_numeric(const std::function<cplx(double)>& f, cplx s, double t_cut,
                              double rel_tol = 1e-10);

}  // namespace fracsys
