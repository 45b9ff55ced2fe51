#pragma once

#include <vector>

#include "fracsys/types.hpp"

namespace fracsys {

struct JordanBlock {
  cplx lambda;
  int size = 1;
};

// Z = transform * (Lambda + N) * transform^{-1}
struct JordanForm {
  Mat transform;
  Mat inverse;  // transform^{-1}
  std::vector<JordanBlock> blocks;

  int dim() const { return static_cast<int>(transform.rows()); }
  Mat jordan_matrix() const;
  Mat reconstruct() const;
};

struct JordanOptions {
  double cluster_tol = -1.0;  // <0: 1e-6 * ||Z||
  double condition_cap = 1e8;
};

JordanForm jordan_decompose(const Mat& z, double cluster_tol);
JordanForm jordan_decompose(const Mat& z, const JordanOptions& opt = {});

double condition_number(const Mat& m);

// M * E_{beta,nu}(t^beta (Lambda + N)) * M^{-1}; block entry (i, i+r) = t^{r beta} E^{(r)}(lambda t^beta) / r!
Mat matrix_ml(double beta, double nu, double t, const JordanForm& jf);

// Block-diagonal inner matrix with g(r, lambda) at (i, i+r).
template <class Kernel>
Mat jordan_inner(const JordanForm& jf, Kernel&& g);

// Same block fill with an arbitrary scalar kernel g(r, lambda) placed at (i, i+r).
template <class Kernel>
Mat fill_jordan(const JordanForm& jf, Kernel&& g);

// E_{B,V}(Z) = sum_n diag(1/Gamma(n beta_j + nu_j)) Z^n
Mat vector_indexed_ml(const std::vector<double>& b, const std::vector<double>& v, const Mat& z,
                      double tol = 1e-15, int max_terms = 1000);

template <class Kernel>
Mat jordan_inner(const JordanForm& jf, Kernel&& g) {
  const int m = jf.dim();
  Mat inner = Mat::Zero(m, m);
  int off = 0;
  for (const auto& b : jf.blocks) {
    for (int r = 0; r < b.size; ++r) {
      cplx val = g(r, b.lambda);
      for (int i = 0; i + r < b.size; ++i) inner(off + i, off + i + r) = val;
    }
    off += b.size;
  }
  return inner;
}

template <class Kernel>
Mat fill_jordan(const JordanForm& jf, Kernel&& g) {
  return jf.transform * jordan_inner(jf, g) * jf.inverse;
}

}  // namespace fracsys
