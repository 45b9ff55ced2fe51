#include "fracsys/ml_scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "fracsys/errors.hpp"
#include "fracsys/gamma.hpp"

namespace fracsys {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTarget = 1e-10;
// accepted internal error, relative to max(1, |E|)
constexpr double kAccept = 1e-12;

void check_params(const MLParams& p, cplx z) {
  if (!std::isfinite(p.beta) || !std::isfinite(p.nu) || !(p.beta > 0.0) || p.beta > 2.0 ||
      !(p.nu > 0.0)) {
    std::ostringstream os;
    os << "Mittag-Leffler parameters out of range (beta=" << p.beta << ", nu=" << p.nu
       << "); need 0 < beta <= 2, nu > 0";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw Error(ErrorKind::InvalidArgument, "non-finite Mittag-Leffler argument");
}

struct Kahan {
  cplx sum{0.0, 0.0};
  cplx c{0.0, 0.0};
  void add(cplx x) {
    cplx y = x - c;
    cplx t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

struct SeriesOut {
  cplx sum;
  double abs_sum = 0.0;
  bool finished = false;
};

// sum_j C(j+k, k) z^j / Gamma(beta (j+k) + nu)  ==  E^{(k)}(z) / k!
SeriesOut taylor(double beta, double nu, cplx z, int k) {
  SeriesOut out;
  Kahan acc;
  cplx zp(1.0, 0.0);
  double binom = 1.0;
  int small = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 20000; ++j) {
    if (j > 0) {
      zp *= z;
      binom *= static_cast<double>(j + k) / j;
    }
    cplx term = binom * zp * rgamma(beta * (j + k) + nu);
    double a = std::abs(term);
    if (!std::isfinite(a) || out.abs_sum > 1e290) return out;
    acc.add(term);
    out.abs_sum += a;
    double scale = std::max(std::abs(acc.sum), 1e-300);
    if ((a <= 1e-17 * scale || a <= 1e-19 * out.abs_sum) && a <= prev) {
      if (++small >= 3) {
        out.sum = acc.sum;
        out.finished = true;
        return out;
      }
    } else {
      small = 0;
    }
    if (a != 0.0) prev = a;
  }
  return out;
}

// ---- parabolic contour (optimal parameters after Garrappa, SINUM 2015) ----

struct ContourPlan {
  double mu = 0.0, h = 0.0;
  double n = std::numeric_limits<double>::infinity();
};

ContourPlan plan_bounded(double t, double phi_j, double phi_j1, double pj, double qj,
                         double log_epsilon) {
  const double log_eps = std::log(kEps);
  const double fac = 1.01;
  ContourPlan plan;
  double f_max = std::exp(log_epsilon - log_eps);
  double sq_phi_j = std::sqrt(phi_j);
  double threshold = 2.0 * std::sqrt((log_epsilon - log_eps) / t);
  double sq_phi_j1 = std::min(std::sqrt(phi_j1), threshold - sq_phi_j);
  double sq_bar_j = 0.0, sq_bar_j1 = 0.0, f_bar = 1.0;
  bool adm = false;
  if (pj < 1e-14 && qj < 1e-14) {
    sq_bar_j = sq_phi_j;
    sq_bar_j1 = sq_phi_j1;
    adm = true;
  } else if (pj < 1e-14) {
    sq_bar_j = sq_phi_j;
    double f_min = sq_phi_j > 0 ? fac * std::pow(sq_phi_j / (sq_phi_j1 - sq_phi_j), qj) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fq = std::pow(f_bar, -1.0 / qj);
      sq_bar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq);
      adm = true;
    }
  } else if (qj < 1e-14) {
    sq_bar_j1 = sq_phi_j1;
    double f_min = fac * std::pow(sq_phi_j1 / (sq_phi_j1 - sq_phi_j), pj);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fp = std::pow(f_bar, -1.0 / pj);
      sq_bar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp);
      adm = true;
    }
  } else {
    double f_min =
        fac * (sq_phi_j + sq_phi_j1) / std::pow(sq_phi_j1 - sq_phi_j, std::max(pj, qj));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fp = std::pow(f_bar, -1.0 / pj);
      double fq = std::pow(f_bar, -1.0 / qj);
      double w = -phi_j1 * t / log_epsilon;
      double den = 2.0 + w - (1.0 + w) * fp + fq;
      sq_bar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
      sq_bar_j1 = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
      adm = true;
    }
  }
  if (!adm) return plan;
  log_epsilon -= std::log(f_bar);
  double w = -sq_bar_j1 * sq_bar_j1 * t / log_epsilon;
  double mu = std::pow(((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w), 2);
  double h = -2.0 * kPi / log_epsilon * (sq_bar_j1 - sq_bar_j) / ((1.0 + w) * sq_bar_j + sq_bar_j1);
  double n = std::ceil(std::sqrt(1.0 - log_epsilon / t / mu) / h);
  if (!(mu > 0.0) || !(h > 0.0) || !std::isfinite(n)) return plan;
  plan.mu = mu;
  plan.h = h;
  plan.n = n;
  return plan;
}

ContourPlan plan_unbounded(double t, double phi_j, double pj, double log_epsilon) {
  ContourPlan plan;
  double sq_phi_j = std::sqrt(phi_j);
  double phibar = phi_j > 0 ? phi_j * 1.01 : 0.01;
  double sq_phibar = std::sqrt(phibar);
  const double f_min = 1.0, f_max = 10.0, f_tar = 5.0;
  double n = 0.0, a = 0.0, sq_mu = 0.0;
  for (int it = 0; it < 200; ++it) {
    double phi_t = phibar * t;
    double lept = log_epsilon / phi_t;
    n = std::ceil(phi_t / kPi * (1.0 - 1.5 * lept + std::sqrt(1.0 - 2.0 * lept)));
    a = kPi * n / phi_t;
    sq_mu = sq_phibar * std::fabs(4.0 - a) / std::fabs(7.0 - std::sqrt(1.0 + 12.0 * a));
    double fbar = std::pow((sq_phibar - sq_phi_j) / sq_mu, -pj);
    if (pj < 1e-14 || (f_min < fbar && fbar < f_max)) break;
    sq_phibar = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
    phibar = sq_phibar * sq_phibar;
  }
  double mu = sq_mu * sq_mu;
  double h = (-3.0 * a - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a)) / (4.0 - a) / n;
  const double log_eps = std::log(kEps);
  double threshold = (log_epsilon - log_eps) / t;
  if (mu > threshold) {
    double q = std::fabs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(mu);
    phibar = std::pow(q + std::sqrt(phi_j), 2);
    if (phibar < threshold) {
      double w = std::sqrt(log_eps / (log_eps - log_epsilon));
      double u = std::sqrt(-phibar * t / log_eps);
      mu = threshold;
      n = std::ceil(w * log_epsilon / 2.0 / kPi / (u * w - 1.0));
      h = std::sqrt(log_eps / (log_eps - log_epsilon)) / n;
    } else {
      return plan;
    }
  }
  if (!(mu > 0.0) || !(h > 0.0) || !std::isfinite(n) || n <= 0) return plan;
  plan.mu = mu;
  plan.h = h;
  plan.n = n;
  return plan;
}

MLResult contour(double alpha, double beta, cplx z) {
  const double t = 1.0;
  const double target = std::log(1e-15);
  double log_epsilon = target;
  double theta = std::arg(z);
  double r = std::pow(std::abs(z), 1.0 / alpha);
  int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / (2.0 * kPi)));
  int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / (2.0 * kPi)));
  std::vector<std::pair<double, cplx>> poles;
  for (int k = kmin; k <= kmax; ++k) {
    cplx s = std::polar(r, (theta + 2.0 * kPi * k) / alpha);
    double phi = 0.5 * (s.real() + std::abs(s));
    if (phi > kEps) poles.emplace_back(phi, s);
  }
  std::sort(poles.begin(), poles.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> phi{0.0};
  std::vector<cplx> sing{cplx(0.0)};
  for (auto& [ph, s] : poles) {
    phi.push_back(ph);
    sing.push_back(s);
  }
  const std::size_t j1 = phi.size();
  std::vector<double> pstr(j1, 1.0), qstr(j1, 1.0);
  pstr[0] = std::max(0.0, -2.0 * (alpha - beta + 1.0));
  qstr[j1 - 1] = std::numeric_limits<double>::infinity();
  phi.push_back(std::numeric_limits<double>::infinity());

  std::vector<std::size_t> regions;
  for (std::size_t j = 0; j < j1; ++j)
    if (phi[j] < (log_epsilon - std::log(kEps)) / t && phi[j] < phi[j + 1]) regions.push_back(j);
  if (regions.empty()) regions.push_back(0);

  std::vector<ContourPlan> plans(j1);
  for (int attempt = 0; attempt < 12; ++attempt) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j : regions) {
      plans[j] = (j + 1 < j1) ? plan_bounded(t, phi[j], phi[j + 1], pstr[j], qstr[j], log_epsilon)
                              : plan_unbounded(t, phi[j], pstr[j], log_epsilon);
      best = std::min(best, plans[j].n);
    }
    if (best <= 200.0) break;
    log_epsilon += std::log(10.0);
  }
  std::size_t jn = regions.front();
  for (std::size_t j : regions)
    if (plans[j].n < plans[jn].n) jn = j;
  const ContourPlan& pl = plans[jn];
  if (!std::isfinite(pl.n)) {
    throw AccuracyLossError("no admissible parabolic contour for E_{" + std::to_string(alpha) +
                                "," + std::to_string(beta) + "}",
                            std::numeric_limits<double>::infinity());
  }

  const int n = static_cast<int>(pl.n);
  Kahan acc;
  for (int k = -n; k <= n; ++k) {
    double u = pl.h * k;
    cplx iu1(1.0, u);
    cplx s = pl.mu * iu1 * iu1;
    cplx ds(-2.0 * pl.mu * u, 2.0 * pl.mu);
    cplx f = std::pow(s, alpha - beta) / (std::pow(s, alpha) - z) * ds;
    acc.add(std::exp(s * t) * f);
  }
  cplx integral = pl.h * acc.sum / (2.0 * kPi * cplx(0.0, 1.0));
  cplx residues(0.0);
  for (std::size_t j = jn + 1; j < j1; ++j)
    residues += std::pow(sing[j], 1.0 - beta) * std::exp(t * sing[j]) / alpha;
  cplx e = integral + residues;
  if (z.imag() == 0.0) e = cplx(e.real(), 0.0);
  double err = std::exp(log_epsilon) * std::max(1.0, std::abs(e));
  return {e, MLRegime::Contour, err};
}

// ---- large-argument expansion ----

bool asymptotic(double alpha, double beta, cplx z, MLResult& out) {
  if (alpha >= 2.0) return false;
  double theta = std::arg(z);
  double az = std::abs(z);
  double r = std::pow(az, 1.0 / alpha);
  int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / (2.0 * kPi)));
  int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / (2.0 * kPi)));
  // poles sitting on the branch cut make the expansion non-uniform
  double gap = std::numeric_limits<double>::infinity();
  for (int k = kmin - 1; k <= kmax + 1; ++k)
    gap = std::min(gap, std::fabs(std::fabs(theta + 2.0 * kPi * k) - alpha * kPi));
  double cut_mass = std::exp(-r) * std::max(1.0, std::pow(r, 1.0 - beta)) / alpha;
  if (gap < 0.05 && cut_mass > 1e-17) return false;

  cplx poles(0.0);
  for (int k = kmin; k <= kmax; ++k) {
    cplx s = std::polar(r, (theta + 2.0 * kPi * k) / alpha);
    if (std::fabs(std::arg(s)) >= kPi) continue;
    poles += std::pow(s, 1.0 - beta) * std::exp(s) / alpha;
  }
  Kahan alg;
  cplx zinv = 1.0 / z;
  cplx zp = 1.0;
  double last = std::numeric_limits<double>::infinity();
  double tail = 0.0;
  bool converged = false;
  for (int k = 1; k <= 400; ++k) {
    zp *= zinv;
    double g = rgamma(beta - alpha * k);
    if (g == 0.0) continue;
    cplx term = -zp * g;
    double a = std::abs(term);
    if (a > last) {
      tail = last;
      converged = true;
      break;
    }
    alg.add(term);
    last = a;
    if (a <= 1e-17 * std::max(std::abs(alg.sum + poles), 1e-300)) {
      tail = a;
      converged = true;
      break;
    }
  }
  if (!converged && last > 0.0) return false;
  if (!converged) tail = 0.0;  // every algebraic term vanished (beta - alpha k at the poles)
  cplx e = poles + alg.sum;
  double err = tail + 1e-15 * std::abs(e);
  if (err > 1e-3 * kAccept * std::max(1.0, std::abs(e))) return false;
  if (z.imag() == 0.0) e = cplx(e.real(), 0.0);
  out = {e, MLRegime::Asymptotic, err};
  return true;
}

MLResult ml_impl(const MLParams& p, cplx z) {
  double az = std::abs(z);
  if (az == 0.0) return {cplx(rgamma(p.nu), 0.0), MLRegime::Series, 0.0};
  bool force_series = p.beta >= 2.0;
  if (az <= kSeriesRadius || force_series) {
    SeriesOut s = taylor(p.beta, p.nu, z, 0);
    double err = 1e-15 * s.abs_sum;
    if (s.finished && err <= kAccept * std::max(1.0, std::abs(s.sum))) {
      cplx v = s.sum;
      if (z.imag() == 0.0) v = cplx(v.real(), 0.0);
      return {v, MLRegime::Series, err};
    }
    if (force_series) {
      double bound = s.finished ? err : std::numeric_limits<double>::infinity();
      throw AccuracyLossError("series evaluation of E_{2,nu} lost accuracy", bound);
    }
  }
  MLResult r;
  if (!(az >= kAsymptoticRadius && asymptotic(p.beta, p.nu, z, r))) r = contour(p.beta, p.nu, z);
  if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
    throw AccuracyLossError("Mittag-Leffler value not representable (overflow)",
                            std::numeric_limits<double>::infinity());
  if (r.error_estimate > kTarget * std::max(1.0, std::abs(r.value)))
    throw AccuracyLossError("contour quadrature cannot reach 1e-10", r.error_estimate);
  return r;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// k-th derivative by the trapezoidal Cauchy integral; radius chosen from a
// short geometric ladder by the smaller of aliasing and round-off estimates.
MLResult cauchy(const MLParams& p, cplx z, int k) {
  const int n = 64;
  double az = std::abs(z);
  double best_err = std::numeric_limits<double>::infinity();
  cplx best(0.0);
  double kf = factorial(k);
  double prev_err = std::numeric_limits<double>::infinity();
  int worse = 0;
  for (int i = 0; i < 12; ++i) {
    double r = 0.5 * std::max(az, 1.0) * std::pow(0.5, i);
    Kahan full, half;
    double mag = 0.0, ferr = 0.0;
    bool ok = true;
    for (int j = 0; j < n; ++j) {
      double th = 2.0 * kPi * j / n;
      MLResult f;
      try {
        f = ml_impl(p, z + std::polar(r, th));
      } catch (const Error&) {
        ok = false;
        break;
      }
      cplx w = f.value * std::polar(1.0, -k * th);
      full.add(w);
      if (j % 2 == 0) half.add(w);
      mag = std::max(mag, std::abs(f.value));
      ferr = std::max(ferr, f.error_estimate);
    }
    if (!ok) continue;
    double scale = kf / std::pow(r, k);
    cplx d = scale * full.sum / static_cast<double>(n);
    cplx d2 = scale * half.sum / static_cast<double>(n / 2);
    double err = std::abs(d - d2) + scale * (ferr + 8.0 * kEps * mag);
    if (err < best_err) {
      best_err = err;
      best = d;
    }
    if (best_err <= 1e-3 * kAccept * std::max(1.0, std::abs(best))) break;
    if (err > prev_err && ++worse >= 2) break;
    prev_err = err;
  }
  if (!std::isfinite(best_err))
    throw AccuracyLossError("Cauchy-integral derivative failed on every radius", best_err);
  if (z.imag() == 0.0) best = cplx(best.real(), 0.0);
  return {best, MLRegime::Cauchy, best_err};
}

// a z E^{(k)}_{nu} = E^{(k-1)}_{nu-1} - (nu - 1 + a (k-1)) E^{(k-1)}_{nu}, started from
// E_{nu-j}, j = 0..k; the lowered second parameters may be <= 0, which every regime accepts.
MLResult lowered(const MLParams& p, cplx z, int k) {
  std::vector<cplx> d(static_cast<std::size_t>(k) + 1);
  std::vector<double> e(d.size());
  for (int j = 0; j <= k; ++j) {
    MLResult r;
    try {
      r = ml_impl({p.beta, p.nu - j}, z);
    } catch (const Error&) {
      return {0.0, MLRegime::Cauchy, std::numeric_limits<double>::infinity()};
    }
    d[static_cast<std::size_t>(j)] = r.value;
    e[static_cast<std::size_t>(j)] = r.error_estimate + kEps * std::abs(r.value);
  }
  const cplx az = p.beta * z;
  for (int kk = 1; kk <= k; ++kk) {
    for (int j = 0; j + kk <= k; ++j) {
      const auto u = static_cast<std::size_t>(j);
      const double c = p.nu - j - 1.0 + p.beta * (kk - 1);
      const cplx a = d[u + 1], b = c * d[u];
      d[u] = (a - b) / az;
      e[u] = (e[u + 1] + std::fabs(c) * e[u] + kEps * (std::abs(a) + std::abs(b))) / std::abs(az);
    }
  }
  cplx v = d[0];
  if (z.imag() == 0.0) v = cplx(v.real(), 0.0);
  return {v, MLRegime::Contour, e[0]};
}

}  // namespace

const char* regime_name(MLRegime r) {
  switch (r) {
    case MLRegime::Series: return "series";
    case MLRegime::Contour: return "contour";
    case MLRegime::Asymptotic: return "asymptotic";
    case MLRegime::Cauchy: return "cauchy";
  }
  return "?";
}

MLResult ml_detailed(const MLParams& p, cplx z) {
  check_params(p, z);
  return ml_impl(p, z);
}

cplx ml(const MLParams& p, cplx z) { return ml_detailed(p, z).value; }

MLResult ml_deriv_detailed(const MLParams& p, cplx z, int k) {
  check_params(p, z);
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  if (k > kMaxDerivOrder)
    throw Error(ErrorKind::UnsupportedOrder,
                "derivative order " + std::to_string(k) + " exceeds cap " +
                    std::to_string(kMaxDerivOrder));
  if (k == 0) return ml_impl(p, z);
  double kf = factorial(k);
  if (std::abs(z) == 0.0) return {cplx(kf * rgamma(p.beta * k + p.nu), 0.0), MLRegime::Series, 0.0};
  if (std::abs(z) <= kSeriesRadius || p.beta >= 2.0) {
    SeriesOut s = taylor(p.beta, p.nu, z, k);
    double err = 1e-15 * s.abs_sum * kf;
    cplx v = kf * s.sum;
    if (s.finished && err <= kAccept * std::max(1.0, std::abs(v))) {
      if (z.imag() == 0.0) v = cplx(v.real(), 0.0);
      return {v, MLRegime::Series, err};
    }
  }
  MLResult r = std::abs(z) >= 1.0 ? lowered(p, z, k) : cauchy(p, z, k);
  if (r.error_estimate > kTarget * std::max(1.0, std::abs(r.value))) r = cauchy(p, z, k);
  if (r.error_estimate > kTarget * std::max(1.0, std::abs(r.value)))
    throw AccuracyLossError("derivative of order " + std::to_string(k) + " lost accuracy",
                            r.error_estimate);
  return r;
}

cplx ml_deriv(const MLParams& p, cplx z, int k) { return ml_deriv_detailed(p, z, k).value; }

cplx ml_kernel(const MLParams& p, cplx z, int k) {
  check_params(p, z);
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  if (k == 0) return ml_impl(p, z).value;
  if (std::abs(z) == 0.0) return rgamma(p.beta * k + p.nu);
  if (std::abs(z) <= kSeriesRadius || k > kMaxDerivOrder) {
    SeriesOut s = taylor(p.beta, p.nu, z, k);
    if (s.finished && 1e-15 * s.abs_sum <= kAccept * std::max(1.0, std::abs(s.sum)))
      return z.imag() == 0.0 ? cplx(s.sum.real(), 0.0) : s.sum;
    if (k > kMaxDerivOrder)
      throw Error(ErrorKind::UnsupportedOrder,
                  "kernel derivative order " + std::to_string(k) +
                      " needs the Taylor regime, |z| = " + std::to_string(std::abs(z)));
  }
  return ml_deriv_detailed(p, z, k).value / factorial(k);
}

cplx ml_kernel_t(double beta, double nu, int k, cplx lambda, double t) {
  double power = k * beta + nu - 1.0;
  if (t == 0.0) {
    if (power > 0.0) return 0.0;
    if (power == 0.0) return rgamma(k * beta + nu);
    return std::numeric_limits<double>::infinity();
  }
  return std::pow(t, power) * ml_kernel({beta, nu}, lambda * std::pow(t, beta), k);
}

}  // namespace fracsys
