#pragma once

#include <map>
#include <vector>

#include "fracsys/types.hpp"

namespace fracsys {

// Finite sum of c * s^gamma with real exponents gamma (principal branch).
class FrExpPoly {
 public:
  static constexpr double kMergeTol = 1e-12;
  static constexpr double kDropTol = 1e-300;

  FrExpPoly() = default;
  static FrExpPoly monomial(double exponent, cplx coef);
  static FrExpPoly constant(cplx coef) { return monomial(0.0, coef); }

  void add_term(double exponent, cplx coef);
  cplx coeff(double exponent) const;
  cplx eval(cplx s) const;

  const std::map<double, cplx>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  double max_exponent() const;
  double min_exponent() const;
  double l1_norm() const;

  FrExpPoly& operator+=(const FrExpPoly& o);
  FrExpPoly& operator-=(const FrExpPoly& o);
  FrExpPoly& operator*=(cplx c);
  FrExpPoly shifted(double by) const;  // multiply by s^by

 private:
  std::map<double, cplx> terms_;
};

FrExpPoly operator+(FrExpPoly a, const FrExpPoly& b);
FrExpPoly operator-(FrExpPoly a, const FrExpPoly& b);
FrExpPoly operator*(const FrExpPoly& a, const FrExpPoly& b);
FrExpPoly operator*(cplx c, FrExpPoly a);

using PolyMatrix = std::vector<std::vector<FrExpPoly>>;

FrExpPoly determinant(const PolyMatrix& a);

// Psi(s) = det(diag(s^beta_j) - F)
FrExpPoly char_function(const std::vector<double>& b, const Mat& f);

// entry (j,l): coefficient of phi_l in L[u_j] * Psi(s)
PolyMatrix cofactor_numerators(const std::vector<double>& b, const Mat& f, Mode mode);

// One term  coef * J^nu [ t^{k base + mu0 - 1} E^{(k)}_{base,mu0}(lambda t^base) / k! ]
// with mu0 = 1 (Caputo) or base (RL); closed form second parameter mu = mu0 + nu.
struct MLKernelTerm {
  cplx coef;
  double nu;
  int k;
  double base;
  double mu;
};

struct SeriesTermList {
  int m = 0;
  Mode mode = Mode::Caputo;
  double base = 0.0;   // smallest order
  cplx lambda;         // kernel argument factor, = -g
  int levels = 0;      // K + 1 levels built
  std::vector<int> perm;  // original index of reindexed position
  // entries[j][l][k] : terms of level k for entry (j,l) in original indexing
  std::vector<std::vector<std::vector<std::vector<MLKernelTerm>>>> entries;

  std::size_t term_count() const;
  // symbol value sum_k sum_terms at complex s (Re s large), original indexing
  Mat symbol(cplx s) const;
  // time-domain value of entry sums at t
  Mat evaluate(double t) const;
};

struct SeriesOptions {
  double t_max = 0.0;        // >0 enables magnitude pruning for t in [0, t_max]
  double prune_tol = 1e-20;
  std::size_t term_cap = 1000000;
};

// Expands level by level; keeps the running power (-R)^k.
class SeriesExpander {
 public:
  SeriesExpander(const std::vector<double>& b, const Mat& f, Mode mode,
                 const SeriesOptions& opt = {});
  // appends level k = levels() to the list and returns it
  void next_level();
  const SeriesTermList& list() const { return list_; }
  int levels() const { return list_.levels; }
  std::size_t live_monomials() const { return power_.size(); }

  // pieces of Psi = s^{beta*}(s^{beta1} + g) + R
  cplx g() const { return g_; }
  const FrExpPoly& remainder() const { return r_; }
  double beta_star() const { return beta_star_; }

 private:
  int m_;
  Mode mode_;
  SeriesOptions opt_;
  std::vector<int> perm_;
  std::vector<double> b_;  // reindexed
  double beta1_ = 0.0, beta_star_ = 0.0;
  cplx g_;
  FrExpPoly r_;
  FrExpPoly neg_r_;
  FrExpPoly power_;  // (-R)^k
  PolyMatrix p_;     // reindexed numerators
  double p_norm_ = 0.0, p_max_exp_ = 0.0, p_min_exp_ = 0.0;
  std::size_t stored_ = 0;
  SeriesTermList list_;

  void prune_power(int k);
};

SeriesTermList series_terms(const std::vector<double>& b, const Mat& f, Mode mode, int k_max,
                            const SeriesOptions& opt = {});

// sum_{k<=K} (-R)^k / (s^{beta*}(s^{beta1}+g))^{k+1}, the truncated 1/Psi
cplx inverse_char_series(const std::vector<double>& b, const Mat& f, int k_max, cplx s);

// principal-branch s^a
inline cplx cpow(cplx s, double a) {
  if (a == 0.0) return 1.0;
  return std::exp(a * std::log(s));
}

}  // namespace fracsys
