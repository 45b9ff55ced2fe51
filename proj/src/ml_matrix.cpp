#include "fracsys/ml_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fracsys/errors.hpp"
#include "fracsys/gamma.hpp"
#include "fracsys/ml_scalar.hpp"

namespace fracsys {

Mat JordanForm::jordan_matrix() const {
  const int m = dim();
  Mat j = Mat::Zero(m, m);
  int off = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.size; ++i) {
      j(off + i, off + i) = b.lambda;
      if (i + 1 < b.size) j(off + i, off + i + 1) = 1.0;
    }
    off += b.size;
  }
  return j;
}

Mat JordanForm::reconstruct() const { return transform * jordan_matrix() * inverse; }

double condition_number(const Mat& m) {
  Eigen::BDCSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  double lo = s(s.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

namespace {

bool is_lower(const Mat& z, double tol) {
  for (int i = 0; i < z.rows(); ++i)
    for (int j = i + 1; j < z.cols(); ++j)
      if (std::abs(z(i, j)) > tol) return false;
  return true;
}

bool is_upper(const Mat& z, double tol) {
  for (int i = 0; i < z.rows(); ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(z(i, j)) > tol) return false;
  return true;
}

int numeric_rank(const Mat& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(a);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

// orthonormal basis of the numerical null space, forced to dimension `dim` when dim >= 0
Mat null_space(const Mat& a, double tol, int dim = -1) {
  const int n = static_cast<int>(a.cols());
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullV);
  int r = 0;
  if (dim >= 0) {
    r = n - dim;
  } else {
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol) ++r;
  }
  return svd.matrixV().rightCols(n - r);
}

// Jordan chains of a nilpotent d x d matrix; returns basis columns and block sizes.
void nilpotent_chains(const Mat& nmat, double tol, Mat& basis, std::vector<int>& sizes) {
  const int d = static_cast<int>(nmat.rows());
  std::vector<int> rank(d + 2, 0);
  std::vector<Mat> kernels(d + 1);
  Mat power = Mat::Identity(d, d);
  rank[0] = d;
  kernels[0] = Mat::Zero(d, 0);
  double scale = std::max(1.0, nmat.norm());
  for (int j = 1; j <= d; ++j) {
    power = power * nmat;
    double tj = tol * std::pow(scale, j);
    rank[j] = numeric_rank(power, tj);
    kernels[j] = null_space(power, tj, d - rank[j]);
  }
  rank[d + 1] = 0;

  struct Chain {
    Vec head;
    int len;
  };
  std::vector<Chain> chains;
  for (int j = d; j >= 1; --j) {
    int count = (rank[j - 1] - rank[j]) - (rank[j] - rank[j + 1]);
    if (count <= 0) continue;
    // span of K_{j-1} plus level-j vectors of longer chains
    std::vector<Vec> span;
    for (int c = 0; c < kernels[j - 1].cols(); ++c) span.push_back(kernels[j - 1].col(c));
    for (const auto& ch : chains) {
      Vec v = ch.head;
      for (int i = 0; i < ch.len - j; ++i) v = nmat * v;
      span.push_back(v);
    }
    Mat q(d, static_cast<Eigen::Index>(span.size()));
    for (std::size_t c = 0; c < span.size(); ++c) q.col(c) = span[c];
    Mat proj = kernels[j];
    if (q.cols() > 0) {
      Eigen::HouseholderQR<Mat> qr(q);
      int rq = numeric_rank(q, 1e-10 * std::max(1.0, q.norm()));
      Mat qq = qr.householderQ() * Mat::Identity(d, rq);
      proj = kernels[j] - qq * (qq.adjoint() * kernels[j]);
    }
    Eigen::BDCSVD<Mat> svd(proj, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // heads: combinations of K_j columns with the strongest component outside the span
    Mat coeffs = svd.matrixV().leftCols(count);
    Mat heads = kernels[j] * coeffs;
    for (int c = 0; c < count; ++c) chains.push_back({heads.col(c), j});
  }
  basis = Mat::Zero(d, d);
  sizes.clear();
  int off = 0;
  for (const auto& ch : chains) {
    Vec v = ch.head;
    for (int i = ch.len - 1; i >= 0; --i) {
      basis.col(off + i) = v;
      v = nmat * v;
    }
    sizes.push_back(ch.len);
    off += ch.len;
  }
  if (off != d) throw Error(ErrorKind::IllConditioned, "Jordan chain construction incomplete");
}

void check_decomposition(JordanForm& jf, const Mat& z, double cap) {
  double cond = condition_number(jf.transform);
  if (!(cond <= cap)) {
    std::ostringstream os;
    os << "Jordan transform condition number " << cond << " exceeds cap " << cap
       << "; solve with the talbot or adams oracle instead";
    throw Error(ErrorKind::IllConditioned, os.str());
  }
  jf.inverse = jf.transform.inverse();
  double res = (jf.reconstruct() - z).norm();
  if (res > 1e-8 * std::max(z.norm(), 1e-300)) {
    std::ostringstream os;
    os << "Jordan reconstruction residual " << res
       << " too large; solve with the talbot or adams oracle instead";
    throw Error(ErrorKind::IllConditioned, os.str());
  }
}

}  // namespace

JordanForm jordan_decompose(const Mat& z, double cluster_tol) {
  JordanOptions o;
  o.cluster_tol = cluster_tol;
  return jordan_decompose(z, o);
}

JordanForm jordan_decompose(const Mat& z, const JordanOptions& opt) {
  if (z.rows() != z.cols() || z.rows() < 1)
    throw Error(ErrorKind::InvalidArgument, "jordan_decompose needs a non-empty square matrix");
  if (!z.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite matrix entry");
  const int m = static_cast<int>(z.rows());
  const double norm = z.norm();
  JordanForm jf;
  if (norm == 0.0) {
    jf.transform = Mat::Identity(m, m);
    jf.inverse = jf.transform;
    for (int i = 0; i < m; ++i) jf.blocks.push_back({0.0, 1});
    return jf;
  }
  const double tol = opt.cluster_tol < 0 ? 1e-6 * norm : opt.cluster_tol;

  Eigen::ComplexEigenSolver<Mat> es(z);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::IllConditioned, "eigenvalue iteration failed");
  const Vec ev = es.eigenvalues();
  bool separated = true;
  for (int i = 0; i < m && separated; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(ev(i) - ev(j)) <= tol) {
        separated = false;
        break;
      }

  // diagonal input: identity transform, no eigen-solver round-off
  bool diagonal = is_lower(z, 0.0) && is_upper(z, 0.0);
  if (diagonal) {
    jf.transform = Mat::Identity(m, m);
    jf.inverse = jf.transform;
    for (int i = 0; i < m; ++i) jf.blocks.push_back({z(i, i), 1});
    return jf;
  }
  if (separated) {
    jf.transform = es.eigenvectors();
    for (int i = 0; i < m; ++i) jf.blocks.push_back({ev(i), 1});
    check_decomposition(jf, z, opt.condition_cap);
    return jf;
  }

  const double ztol = 1e-14 * norm;
  if (!is_lower(z, ztol) && !is_upper(z, ztol)) {
    throw Error(ErrorKind::IllConditioned,
                "clustered eigenvalues without triangular structure; solve with the talbot or "
                "adams oracle instead");
  }
  // cluster the diagonal in order of first occurrence
  std::vector<int> owner(m, -1);
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < m; ++i) {
    if (owner[i] >= 0) continue;
    owner[i] = static_cast<int>(clusters.size());
    clusters.push_back({i});
    for (std::size_t c = 0; c < clusters.back().size(); ++c) {
      int a = clusters.back()[c];
      for (int j = 0; j < m; ++j)
        if (owner[j] < 0 && std::abs(z(a, a) - z(j, j)) <= tol) {
          owner[j] = owner[i];
          clusters.back().push_back(j);
        }
    }
  }
  jf.transform = Mat::Zero(m, m);
  int off = 0;
  for (const auto& cl : clusters) {
    const int d = static_cast<int>(cl.size());
    cplx lam(0.0);
    for (int i : cl) lam += z(i, i);
    lam /= static_cast<double>(d);
    Mat shifted = z - lam * Mat::Identity(m, m);
    Mat w;
    if (d == m) {
      w = Mat::Identity(m, m);
    } else {
      Mat p = Mat::Identity(m, m);
      for (int i = 0; i < d; ++i) p = p * shifted;
      w = null_space(p, 0.0, d);
    }
    Mat nmat = w.adjoint() * shifted * w;
    Mat basis;
    std::vector<int> sizes;
    nilpotent_chains(nmat, std::max(tol, 1e-10 * norm), basis, sizes);
    jf.transform.middleCols(off, d) = w * basis;
    for (int s : sizes) jf.blocks.push_back({lam, s});
    off += d;
  }
  check_decomposition(jf, z, opt.condition_cap);
  return jf;
}

Mat matrix_ml(double beta, double nu, double t, const JordanForm& jf) {
  if (!(beta > 0.0) || !(nu > 0.0))
    throw Error(ErrorKind::InvalidArgument, "matrix_ml needs beta, nu > 0");
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "matrix_ml needs t >= 0");
  const double tb = std::pow(t, beta);
  return fill_jordan(jf, [&](int r, cplx lam) -> cplx {
    if (r > 0 && t == 0.0) return 0.0;
    return std::pow(tb, r) * ml_kernel({beta, nu}, lam * tb, r);
  });
}

Mat vector_indexed_ml(const std::vector<double>& b, const std::vector<double>& v, const Mat& z,
                      double tol, int max_terms) {
  const int m = static_cast<int>(z.rows());
  if (z.cols() != m || static_cast<int>(b.size()) != m || static_cast<int>(v.size()) != m)
    throw Error(ErrorKind::InvalidArgument, "vector_indexed_ml: inconsistent sizes");
  for (int j = 0; j < m; ++j)
    if (!(b[j] > 0.0) || !(v[j] > 0.0))
      throw Error(ErrorKind::InvalidArgument, "vector index entries must be positive");
  // Z^n carried as pow * exp(logscale) to survive large n
  Mat pow = Mat::Identity(m, m);
  double logscale = 0.0;
  Mat sum = Mat::Zero(m, m);
  int small = 0;
  for (int n = 0; n < max_terms; ++n) {
    if (n > 0) {
      pow = pow * z;
      double pn = pow.norm();
      if (pn == 0.0) return sum;
      if (pn > 1e100 || pn < 1e-100) {
        logscale += std::log(pn);
        pow /= pn;
      }
    }
    Mat term(m, m);
    for (int j = 0; j < m; ++j) {
      double x = n * b[j] + v[j];
      double w = std::exp(logscale - lgamma_abs(x));
      term.row(j) = w * pow.row(j);
    }
    sum += term;
    double tn = term.norm();
    if (!std::isfinite(tn) || !sum.allFinite())
      throw Error(ErrorKind::SeriesDivergence, "vector-indexed ML partial sums overflowed");
    if (tn <= tol * std::max(sum.norm(), 1e-300)) {
      if (++small >= 3) return sum;
    } else {
      small = 0;
    }
  }
  throw Error(ErrorKind::SeriesDivergence,
              "vector-indexed ML did not converge within " + std::to_string(max_terms) + " terms");
}

}  // namespace fracsys
