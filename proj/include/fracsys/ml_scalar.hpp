#pragma once

#include "fracsys/types.hpp"

namespace fracsys {

struct MLParams {
  double beta = 1.0;
  double nu = 1.0;
};

enum class MLRegime { Series, Contour, Asymptotic, Cauchy };

const char* regime_name(MLRegime r);

struct MLResult {
  cplx value;
  MLRegime regime;
  double error_estimate;  // absolute
};

inline constexpr int kMaxDerivOrder = 20;
inline constexpr double kSeriesRadius = 5.0;
inline constexpr double kAsymptoticRadius = 100.0;

// E_{beta,nu}(z) = sum z^n / Gamma(beta n + nu)
cplx ml(const MLParams& p, cplx z);
MLResult ml_detailed(const MLParams& p, cplx z);

// d^k/dz^k E_{beta,nu}(z), k <= kMaxDerivOrder
cplx ml_deriv(const MLParams& p, cplx z, int k);
MLResult ml_deriv_detailed(const MLParams& p, cplx z, int k);

// E^{(k)}_{beta,nu}(z) / k!. No order cap while the Taylor series is usable,
// which is where the solution-symbol series lives.
cplx ml_kernel(const MLParams& p, cplx z, int k);

// t^{k beta + nu - 1} E^{(k)}_{beta,nu}(lambda t^beta) / k!, t >= 0.
cplx ml_kernel_t(double beta, double nu, int k, cplx lambda, double t);

}  // namespace fracsys
