#include "fracsys/symbol_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fracsys/errors.hpp"
#include "fracsys/gamma.hpp"
#include "fracsys/ml_scalar.hpp"

namespace fracsys {

FrExpPoly FrExpPoly::monomial(double exponent, cplx coef) {
  FrExpPoly p;
  p.add_term(exponent, coef);
  return p;
}

void FrExpPoly::add_term(double exponent, cplx coef) {
  if (std::abs(coef) <= kDropTol) return;
  auto it = terms_.lower_bound(exponent - kMergeTol);
  if (it != terms_.end() && it->first <= exponent + kMergeTol) {
    it->second += coef;
    if (std::abs(it->second) <= kDropTol) terms_.erase(it);
    return;
  }
  terms_.emplace(exponent, coef);
}

cplx FrExpPoly::coeff(double exponent) const {
  auto it = terms_.lower_bound(exponent - kMergeTol);
  if (it != terms_.end() && it->first <= exponent + kMergeTol) return it->second;
  return 0.0;
}

cplx FrExpPoly::eval(cplx s) const {
  cplx acc = 0.0;
  const cplx ls = std::log(s);
  for (const auto& [e, c] : terms_) acc += c * (e == 0.0 ? cplx(1.0) : std::exp(e * ls));
  return acc;
}

double FrExpPoly::max_exponent() const { return terms_.empty() ? 0.0 : terms_.rbegin()->first; }
double FrExpPoly::min_exponent() const { return terms_.empty() ? 0.0 : terms_.begin()->first; }

double FrExpPoly::l1_norm() const {
  double s = 0.0;
  for (const auto& kv : terms_) s += std::abs(kv.second);
  return s;
}

FrExpPoly& FrExpPoly::operator+=(const FrExpPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

FrExpPoly& FrExpPoly::operator-=(const FrExpPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

FrExpPoly& FrExpPoly::operator*=(cplx c) {
  FrExpPoly out;
  for (const auto& [e, v] : terms_) out.add_term(e, v * c);
  *this = std::move(out);
  return *this;
}

FrExpPoly FrExpPoly::shifted(double by) const {
  FrExpPoly out;
  for (const auto& [e, v] : terms_) out.add_term(e + by, v);
  return out;
}

FrExpPoly operator+(FrExpPoly a, const FrExpPoly& b) { return a += b; }
FrExpPoly operator-(FrExpPoly a, const FrExpPoly& b) { return a -= b; }
FrExpPoly operator*(cplx c, FrExpPoly a) { return a *= c; }

FrExpPoly operator*(const FrExpPoly& a, const FrExpPoly& b) {
  FrExpPoly out;
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) out.add_term(ea + eb, ca * cb);
  return out;
}

FrExpPoly determinant(const PolyMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return FrExpPoly::constant(1.0);
  for (const auto& row : a)
    if (row.size() != n) throw Error(ErrorKind::InvalidArgument, "determinant of a non-square matrix");
  if (n == 1) return a[0][0];
  FrExpPoly acc;
  for (std::size_t c = 0; c < n; ++c) {
    if (a[0][c].empty()) continue;
    PolyMatrix minor(n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) minor[r - 1].push_back(a[r][k]);
    FrExpPoly term = a[0][c] * determinant(minor);
    if (c % 2 == 1) term *= -1.0;
    acc += term;
  }
  return acc;
}

namespace {

void check_system(const std::vector<double>& b, const Mat& f) {
  const auto m = static_cast<Eigen::Index>(b.size());
  if (m < 1 || f.rows() != m || f.cols() != m)
    throw Error(ErrorKind::InvalidArgument, "order vector and matrix sizes disagree");
  for (double x : b)
    if (!(x > 0.0 && x <= 1.0)) {
      std::ostringstream os;
      os << "orders must lie in (0,1], got " << x;
      throw Error(ErrorKind::InvalidOrder, os.str());
    }
  if (!f.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite matrix entry");
}

PolyMatrix symbol_matrix(const std::vector<double>& b, const Mat& f) {
  const std::size_t m = b.size();
  PolyMatrix a(m, std::vector<FrExpPoly>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      if (i == k) a[i][k].add_term(b[i], 1.0);
      a[i][k].add_term(0.0, -f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    }
  return a;
}

// log of the largest value of 1/Gamma on [a, inf)
double log_rgamma_sup(double a) {
  constexpr double kArgMin = 1.4616321449683623;
  if (a >= kArgMin) return -std::lgamma(a);
  return std::log(1.1287870299081260);
}

// bound on sum_i C(i+k,k) x^i / Gamma(beta (i+k) + mu) over mu >= mu_min
double kernel_bound(int k, double beta, double mu_min, double x) {
  double sum = 0.0;
  const double lk = std::lgamma(k + 1.0);
  const double lx = x > 0.0 ? std::log(x) : -INFINITY;
  double prev = INFINITY;
  for (int i = 0; i < 2000; ++i) {
    double a = beta * (i + k) + mu_min;
    double lterm = std::lgamma(i + k + 1.0) - std::lgamma(i + 1.0) - lk;
    if (i > 0) lterm += i * lx;
    lterm += log_rgamma_sup(a);
    if (lterm > 700.0) return INFINITY;
    double term = std::exp(lterm);
    sum += term;
    if (i > 0 && (x == 0.0 || (term < 1e-16 * sum && term < prev))) break;
    prev = term;
  }
  return sum;
}

}  // namespace

FrExpPoly char_function(const std::vector<double>& b, const Mat& f) {
  check_system(b, f);
  return determinant(symbol_matrix(b, f));
}

PolyMatrix cofactor_numerators(const std::vector<double>& b, const Mat& f, Mode mode) {
  check_system(b, f);
  const std::size_t m = b.size();
  const PolyMatrix a = symbol_matrix(b, f);
  PolyMatrix out(m, std::vector<FrExpPoly>(m));
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t j = 0; j < m; ++j) {
      PolyMatrix minor;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == l) continue;
        std::vector<FrExpPoly> row;
        for (std::size_t c = 0; c < m; ++c)
          if (c != j) row.push_back(a[r][c]);
        minor.push_back(std::move(row));
      }
      FrExpPoly cof = determinant(minor);
      if ((l + j) % 2 == 1) cof *= -1.0;
      out[j][l] = mode == Mode::Caputo ? cof.shifted(b[l] - 1.0) : cof;
    }
  return out;
}

std::size_t SeriesTermList::term_count() const {
  std::size_t n = 0;
  for (const auto& row : entries)
    for (const auto& e : row)
      for (const auto& lvl : e) n += lvl.size();
  return n;
}

Mat SeriesTermList::symbol(cplx s) const {
  Mat out = Mat::Zero(m, m);
  const cplx sb = cpow(s, base);
  const cplx den = sb - lambda;
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l)
      for (const auto& lvl : entries[j][l])
        for (const auto& t : lvl)
          out(j, l) += t.coef * cpow(s, base - t.mu) / std::pow(den, t.k + 1);
  return out;
}

Mat SeriesTermList::evaluate(double t) const {
  Mat out = Mat::Zero(m, m);
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l)
      for (const auto& lvl : entries[j][l])
        for (const auto& term : lvl)
          out(j, l) += term.coef * ml_kernel_t(base, term.mu, term.k, lambda, t);
  return out;
}

SeriesExpander::SeriesExpander(const std::vector<double>& b, const Mat& f, Mode mode,
                               const SeriesOptions& opt)
    : m_(static_cast<int>(b.size())), mode_(mode), opt_(opt) {
  check_system(b, f);
  const int lo = static_cast<int>(std::min_element(b.begin(), b.end()) - b.begin());
  perm_.push_back(lo);
  for (int i = 0; i < m_; ++i)
    if (i != lo) perm_.push_back(i);
  Mat fp(m_, m_);
  for (int i = 0; i < m_; ++i) {
    b_.push_back(b[perm_[i]]);
    for (int k = 0; k < m_; ++k) fp(i, k) = f(perm_[i], perm_[k]);
  }
  beta1_ = b_[0];
  beta_star_ = std::accumulate(b_.begin() + 1, b_.end(), 0.0);

  const FrExpPoly psi = char_function(b_, fp);
  g_ = psi.coeff(beta_star_);
  r_ = psi;
  r_.add_term(beta_star_ + beta1_, -1.0);
  r_.add_term(beta_star_, -g_);
  neg_r_ = r_;
  neg_r_ *= -1.0;
  power_ = FrExpPoly::constant(1.0);

  p_ = cofactor_numerators(b_, fp, mode);
  p_max_exp_ = -INFINITY;
  p_min_exp_ = INFINITY;
  for (const auto& row : p_)
    for (const auto& e : row) {
      p_norm_ = std::max(p_norm_, e.l1_norm());
      if (e.empty()) continue;
      p_max_exp_ = std::max(p_max_exp_, e.max_exponent());
      p_min_exp_ = std::min(p_min_exp_, e.min_exponent());
    }

  list_.m = m_;
  list_.mode = mode;
  list_.base = beta1_;
  list_.lambda = -g_;
  list_.perm = perm_;
  list_.entries.assign(m_, std::vector<std::vector<std::vector<MLKernelTerm>>>(m_));
}

void SeriesExpander::prune_power(int k) {
  if (!(opt_.t_max > 0.0) || power_.empty()) return;
  const double tt = opt_.t_max;
  const double x = std::abs(list_.lambda) * std::pow(tt, beta1_);
  FrExpPoly kept;
  for (const auto& [gr, c] : power_.terms()) {
    double mu_min = beta1_ - p_max_exp_ - gr + (k + 1) * beta_star_;
    double mu_max = beta1_ - p_min_exp_ - gr + (k + 1) * beta_star_;
    double p_lo = k * beta1_ + mu_min - 1.0, p_hi = k * beta1_ + mu_max - 1.0;
    double tp = std::max(std::pow(tt, p_lo), std::pow(tt, p_hi));
    double bound = std::abs(c) * p_norm_ * tp * kernel_bound(k, beta1_, std::max(mu_min, 1e-300), x);
    if (!(bound < opt_.prune_tol)) kept.add_term(gr, c);
  }
  power_ = std::move(kept);
}

void SeriesExpander::next_level() {
  const int k = list_.levels;
  if (k > 0) {
    power_ = power_ * neg_r_;
    prune_power(k);
  }
  const double mu0 = mode_ == Mode::Caputo ? 1.0 : beta1_;
  for (int a = 0; a < m_; ++a)
    for (int c = 0; c < m_; ++c) {
      const FrExpPoly n = p_[a][c] * power_;
      auto& lvl = list_.entries[perm_[a]][perm_[c]];
      lvl.resize(k + 1);
      for (const auto& [gamma, coef] : n.terms()) {
        double mu = beta1_ - gamma + (k + 1) * beta_star_;
        double nu = mu - mu0;
        if (nu < -1e-9) {
          std::ostringstream os;
          os << "series term with negative integral order " << nu << " at level " << k;
          throw Error(ErrorKind::Consistency, os.str());
        }
        if (nu < 0.0) {
          nu = 0.0;
          mu = mu0;
        }
        lvl[k].push_back({coef, nu, k, beta1_, mu});
      }
      stored_ += lvl[k].size();
    }
  if (stored_ > opt_.term_cap) {
    std::ostringstream os;
    os << "series expansion exceeded " << opt_.term_cap << " terms at level " << k;
    throw Error(ErrorKind::TruncationLimit, os.str());
  }
  ++list_.levels;
}

SeriesTermList series_terms(const std::vector<double>& b, const Mat& f, Mode mode, int k_max,
                            const SeriesOptions& opt) {
  if (k_max < 0) throw Error(ErrorKind::InvalidArgument, "negative truncation level");
  SeriesExpander ex(b, f, mode, opt);
  for (int k = 0; k <= k_max; ++k) ex.next_level();
  return ex.list();
}

cplx inverse_char_series(const std::vector<double>& b, const Mat& f, int k_max, cplx s) {
  SeriesExpander ex(b, f, Mode::Caputo);
  const double beta1 = *std::min_element(b.begin(), b.end());
  const cplx d = cpow(s, ex.beta_star()) * (cpow(s, beta1) + ex.g());
  const cplx q = -ex.remainder().eval(s) / d;
  cplx acc = 0.0, qp = 1.0 / d;
  for (int k = 0; k <= k_max; ++k) {
    acc += qp;
    qp *= q;
  }
  return acc;
}

}  // namespace fracsys
