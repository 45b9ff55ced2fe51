#include "fracsys/frac_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "fracsys/errors.hpp"
#include "fracsys/gamma.hpp"

namespace fracsys {

SampledFunction::SampledFunction(double step, std::vector<cplx> vals, double pw)
    : h(step), values(std::move(vals)), power(pw) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid step must be positive");
  if (!(power > -1.0)) throw Error(ErrorKind::InvalidArgument, "endpoint weight power must exceed -1");
}

SampledFunction SampledFunction::from_grid(const std::vector<double>& grid, std::vector<cplx> vals,
                                           double pw) {
  if (grid.size() < 2 || grid.size() != vals.size())
    throw Error(ErrorKind::InvalidArgument, "grid and values must match and hold >= 2 points");
  if (grid[0] != 0.0) throw Error(ErrorKind::InvalidArgument, "grid must start at 0");
  double h = (grid.back() - grid[0]) / static_cast<double>(grid.size() - 1);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double d = grid[i] - grid[i - 1];
    if (!(d > 0.0) || std::fabs(d - h) > 1e-12 * h * std::max<double>(1.0, static_cast<double>(i)))
      throw Error(ErrorKind::InvalidArgument, "grid is not uniform");
  }
  return SampledFunction(h, std::move(vals), pw);
}

SampledFunction SampledFunction::sample(const std::function<cplx(double)>& f, double h,
                                        std::size_t n) {
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(h * static_cast<double>(i));
  return SampledFunction(h, std::move(v), 0.0);
}

SampledFunction SampledFunction::sample_weighted(const std::function<cplx(double)>& regular,
                                                 double h, std::size_t n, double power) {
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = regular(h * static_cast<double>(i));
  return SampledFunction(h, std::move(v), power);
}

std::vector<double> SampledFunction::grid() const {
  std::vector<double> g(size());
  for (std::size_t i = 0; i < size(); ++i) g[i] = t(i);
  return g;
}

cplx SampledFunction::at(std::size_t i) const {
  if (power == 0.0) return values[i];
  if (i == 0) {
    if (power > 0.0) return 0.0;
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  return std::pow(t(i), power) * values[i];
}

std::vector<cplx> SampledFunction::full() const {
  std::vector<cplx> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = at(i);
  return out;
}

namespace {

void require_same(const SampledFunction& a, const SampledFunction& b) {
  if (a.size() != b.size() || std::fabs(a.h - b.h) > 1e-12 * a.h)
    throw Error(ErrorKind::IncompatibleGrids, "sampled functions live on different grids");
}

}  // namespace

SampledFunction reweight(const SampledFunction& a, double power) {
  if (a.power == power) return a;
  SampledFunction out = a;
  out.power = power;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == 0) {
      // t^{a.power - power} -> 0 as t -> 0 when a is less singular
      out.values[0] = (a.power > power) ? cplx(0.0) : a.values[0];
      continue;
    }
    out.values[i] = a.values[i] * std::pow(a.t(i), a.power - power);
  }
  return out;
}

SampledFunction& SampledFunction::operator*=(cplx c) {
  for (auto& v : values) v *= c;
  return *this;
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& o) {
  require_same(*this, o);
  double p = std::min(power, o.power);
  SampledFunction a = reweight(*this, p), b = reweight(o, p);
  for (std::size_t i = 0; i < size(); ++i) a.values[i] += b.values[i];
  *this = std::move(a);
  return *this;
}

SampledFunction& SampledFunction::operator-=(const SampledFunction& o) {
  SampledFunction n = o;
  n *= -1.0;
  return *this += n;
}

SampledFunction operator*(cplx c, SampledFunction f) {
  f *= c;
  return f;
}
SampledFunction operator+(SampledFunction a, const SampledFunction& b) {
  a += b;
  return a;
}
SampledFunction operator-(SampledFunction a, const SampledFunction& b) {
  a -= b;
  return a;
}

double sup_diff(const SampledFunction& a, const SampledFunction& b, std::size_t from) {
  require_same(a, b);
  double m = 0.0;
  for (std::size_t i = from; i < a.size(); ++i) {
    if (i == 0 && (a.power < 0 || b.power < 0)) continue;
    m = std::max(m, std::abs(a.at(i) - b.at(i)));
  }
  return m;
}

namespace {

// Cell moments of x^a on [c, c+1]: m0 = int x^a, m1 = int x^a (x - c).
struct Moments {
  std::vector<double> m0, m1;
};

Moments cell_moments(double a, std::size_t n) {
  Moments mo;
  mo.m0.resize(n);
  mo.m1.resize(n);
  for (std::size_t ci = 0; ci < n; ++ci) {
    double c = static_cast<double>(ci);
    if (a == 0.0) {
      mo.m0[ci] = 1.0;
      mo.m1[ci] = 0.5;
    } else if (ci == 0) {
      mo.m0[ci] = 1.0 / (a + 1.0);
      mo.m1[ci] = 1.0 / (a + 2.0);
    } else if (ci < 4) {
      double p1 = std::pow(c + 1.0, a + 1.0) - std::pow(c, a + 1.0);
      double p2 = std::pow(c + 1.0, a + 2.0) - std::pow(c, a + 2.0);
      mo.m0[ci] = p1 / (a + 1.0);
      mo.m1[ci] = p2 / (a + 2.0) - c * mo.m0[ci];
    } else {
      // (c+u)^a = c^a sum_j binom(a,j) (u/c)^j, integrated over u in [0,1]
      double s0 = 0.0, s1 = 0.0, b = 1.0, q = 1.0;
      for (int j = 0; j < 80; ++j) {
        double t0 = b * q / (j + 1.0), t1 = b * q / (j + 2.0);
        s0 += t0;
        s1 += t1;
        if (std::fabs(t0) < 1e-18 * std::fabs(s0)) break;
        b *= (a - j) / (j + 1.0);
        q /= c;
      }
      double ca = std::pow(c, a);
      mo.m0[ci] = ca * s0;
      mo.m1[ci] = ca * s1;
    }
  }
  return mo;
}

double beta_fn(double x, double y) { return boost::math::beta(x, y); }

// int_{u0}^{u1} u^{p-1} (1-u)^{q-1} du
double beta_cell(double p, double q, double u0, double u1) {
  if (u1 <= 0.5) return boost::math::beta(p, q, u1) - boost::math::beta(p, q, u0);
  return boost::math::betac(p, q, u0) - (u1 >= 1.0 ? 0.0 : boost::math::betac(p, q, u1));
}

// Near the origin both endpoint weights vary across a cell, so integrate
// x^a (k-x)^b against the product of the two linear interpolants: exact beta
// moments on the two end cells, Gauss-Legendre on the smooth interior cells.
constexpr std::size_t kNearField = 256;

cplx near_field(const std::vector<cplx>& rf, const std::vector<cplx>& rg, double a, double b,
                std::size_t k) {
  using GL = boost::math::quadrature::gauss<double, 8>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  const double kk = static_cast<double>(k);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = k - i - 1;
    const cplx a1 = rf[i + 1] - rf[i], b1 = rg[j + 1] - rg[j];
    if (i == 0 || j == 0) {
      const cplx a0 = rf[i] - static_cast<double>(i) * a1, b0 = rg[j] - static_cast<double>(j) * b1;
      const double u0 = static_cast<double>(i) / kk, u1 = static_cast<double>(i + 1) / kk;
      const cplx ac[2] = {a0, a1}, bc[2] = {b0, b1};
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
          if (ac[m] == 0.0 || bc[n] == 0.0) continue;
          acc += ac[m] * bc[n] * std::pow(kk, a + b + m + n + 1.0) *
                 beta_cell(a + m + 1.0, b + n + 1.0, u0, u1);
        }
      continue;
    }
    const double mid = static_cast<double>(i) + 0.5;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      for (double sg : {-1.0, 1.0}) {
        if (q == 0 && xs[0] == 0.0 && sg > 0) continue;
        const double d = 0.5 * sg * xs[q], x = mid + d;
        const cplx lf = rf[i] + (d + 0.5) * a1, lg = rg[j] + (0.5 - d) * b1;
        acc += 0.5 * ws[q] * std::pow(x, a) * std::pow(kk - x, b) * lf * lg;
      }
    }
  }
  return acc;
}

}  // namespace

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
  require_same(f, g);
  const std::size_t n = f.size();
  const double h = f.h, a = f.power, b = g.power;
  const Moments ma = cell_moments(a, n), mb = cell_moments(b, n);
  const double ha = std::pow(h, a + 1.0), hb = std::pow(h, b + 1.0);
  const double hab = std::pow(h, a + b + 1.0);
  const std::vector<cplx> ff = f.full(), gf = g.full();
  const std::vector<cplx>& rf = f.values;
  const std::vector<cplx>& rg = g.values;
  const double p = std::min(0.0, a + b + 1.0);

  std::vector<cplx> out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    cplx acc = 0.0;
    if (k == 1 || (k < kNearField && (a != 0.0 || b != 0.0))) {
      acc = hab * near_field(rf, rg, a, b, k);
    } else {
      const std::size_t split = k / 2;
      cplx lo = 0.0;
      for (std::size_t i = 0; i <= split; ++i) {
        double w = 0.0;
        if (i < split) w += ma.m0[i] - ma.m1[i];
        if (i >= 1) w += ma.m1[i - 1];
        lo += w * rf[i] * gf[k - i];
      }
      cplx hi = 0.0;
      const std::size_t ymax = k - split;
      for (std::size_t y = 0; y <= ymax; ++y) {
        double w = 0.0;
        if (y < ymax) w += mb.m0[y] - mb.m1[y];
        if (y >= 1) w += mb.m1[y - 1];
        hi += w * ff[k - y] * rg[y];
      }
      acc = ha * lo + hb * hi;
    }
    out[k] = (p < 0.0) ? acc / std::pow(f.t(k), p) : acc;
  }
  if (p < 0.0 || a + b + 1.0 == 0.0) out[0] = rf[0] * rg[0] * beta_fn(a + 1.0, b + 1.0);
  return SampledFunction(h, std::move(out), p);
}

SampledFunction frac_integral(const SampledFunction& f, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << "fractional integral order must be positive, got " << alpha;
    throw Error(ErrorKind::InvalidOrder, os.str());
  }
  const std::size_t n = f.size();
  if (f.power != 0.0) {
    std::vector<cplx> k(n, rgamma(alpha));
    return convolve(f, SampledFunction(f.h, std::move(k), alpha - 1.0));
  }
  // product trapezoid: exact moments of y^{alpha-1} against piecewise-linear f
  const Moments mo = cell_moments(alpha - 1.0, n);
  const double scale = std::pow(f.h, alpha) * rgamma(alpha);
  std::vector<double> w0(n), w1(n);
  for (std::size_t d = 0; d < n; ++d) {
    w0[d] = mo.m0[d] - mo.m1[d];
    w1[d] = mo.m1[d];
  }
  std::vector<cplx> out(n, 0.0);
  const auto& v = f.values;
  for (std::size_t k = 1; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t d = 0; d < k; ++d) acc += w0[d] * v[k - d] + w1[d] * v[k - d - 1];
    out[k] = scale * acc;
  }
  return SampledFunction(f.h, std::move(out), 0.0);
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    std::ostringstream os;
    os << "derivative order must lie in (0,1), got " << beta;
    throw Error(ErrorKind::InvalidOrder, os.str());
  }
}

}  // namespace

SampledFunction caputo_deriv(const SampledFunction& f, double beta) {
  check_beta(beta);
  if (f.power != 0.0)
    throw Error(ErrorKind::InvalidArgument, "Caputo derivative needs a regular sampled function");
  const std::size_t n = f.size();
  std::vector<double> bk(n);
  const double e = 1.0 - beta;
  for (std::size_t k = 0; k < n; ++k) {
    double kk = static_cast<double>(k);
    bk[k] = (k == 0) ? 1.0 : std::pow(kk, e) * std::expm1(e * std::log1p(1.0 / kk));
  }
  const double scale = std::pow(f.h, -beta) * rgamma(2.0 - beta);
  std::vector<cplx> diff(n, 0.0), out(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) diff[j] = f.values[j + 1] - f.values[j];
  for (std::size_t k = 1; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += bk[k - 1 - j] * diff[j];
    out[k] = scale * acc;
  }
  return SampledFunction(f.h, std::move(out), 0.0);
}

SampledFunction rl_deriv(const SampledFunction& f, double beta) {
  check_beta(beta);
  if (f.power != 0.0)
    throw Error(ErrorKind::InvalidArgument, "RL derivative needs a regular sampled function");
  const std::size_t n = f.size();
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "RL derivative needs >= 3 grid points");
  const cplx f0 = f.values[0];
  SampledFunction shifted = f;
  for (auto& v : shifted.values) v -= f0;
  SampledFunction g = frac_integral(shifted, 1.0 - beta);
  const auto& gv = g.values;
  const double h = f.h;
  std::vector<cplx> d(n);
  d[0] = (-3.0 * gv[0] + 4.0 * gv[1] - gv[2]) / (2.0 * h);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (gv[k + 1] - gv[k - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * gv[n - 1] - 4.0 * gv[n - 2] + gv[n - 3]) / (2.0 * h);
  if (f0 == 0.0) return SampledFunction(h, std::move(d), 0.0);
  // f(0) t^{-beta} / Gamma(1-beta) carried exactly
  const double c = rgamma(1.0 - beta);
  std::vector<cplx> r(n);
  r[0] = f0 * c;
  for (std::size_t k = 1; k < n; ++k) r[k] = std::pow(f.t(k), beta) * d[k] + f0 * c;
  return SampledFunction(h, std::move(r), -beta);
}

LaplaceResult laplace_numeric(const std::function<cplx(double)>& f, cplx s, double t_cut,
                              double rel_tol) {
  if (!(s.real() > 0.0)) throw Error(ErrorKind::InvalidArgument, "laplace_numeric needs Re(s) > 0");
  if (!(t_cut > 0.0)) throw Error(ErrorKind::InvalidArgument, "laplace_numeric needs T_cut > 0");
  boost::math::quadrature::tanh_sinh<double> ts(12);
  auto integrand = [&](double t) { return std::exp(-s * t) * f(t); };
  double err_re = 0.0, err_im = 0.0, l1 = 0.0;
  const double qtol = std::min(1e-12, rel_tol * 1e-2);
  // split the range so the exponential decay is resolved
  const double scale = std::min(t_cut, 8.0 / s.real());
  std::vector<double> cuts{0.0};
  for (double c = scale; c < t_cut; c *= 2.0) cuts.push_back(c);
  cuts.push_back(t_cut);
  cplx value = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e1 = 0.0, e2 = 0.0, l = 0.0;
    double re = ts.integrate([&](double t) { return integrand(t).real(); }, cuts[i], cuts[i + 1],
                             qtol, &e1, &l);
    l1 += l;
    double im = ts.integrate([&](double t) { return integrand(t).imag(); }, cuts[i], cuts[i + 1],
                             qtol, &e2, &l);
    l1 += l;
    value += cplx(re, im);
    err_re += e1;
    err_im += e2;
  }
  double tail = 0.0;
  for (double k : {1.0, 1.25, 1.5, 2.0}) {
    double t = k * t_cut;
    tail = std::max(tail, std::abs(f(t)) * std::exp(-s.real() * t) / s.real());
  }
  tail *= 2.0;
  double err = err_re + err_im + tail;
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) ||
      tail > rel_tol * std::abs(value) + 1e-300) {
    std::ostringstream os;
    os << "Laplace tail estimate " << tail << " exceeds tolerance at s = " << s
       << " (increase T_cut)";
    throw Error(ErrorKind::InaccurateTransform, os.str());
  }
  return {value, err};
}

}  // namespace fracsys
