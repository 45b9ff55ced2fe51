#include "fracsys/solver_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>

#include "fracsys/errors.hpp"
#include "fracsys/frac_ops.hpp"
#include "fracsys/gamma.hpp"
#include "fracsys/ml_scalar.hpp"
#include "fracsys/oracles.hpp"
#include "fracsys/symbol_algebra.hpp"

namespace fracsys {

Mat OperatorSamples::full(std::size_t i) const {
  Mat s = values[i];
  if (mode == Mode::Caputo) return s;
  const double t = grid[i];
  for (int l = 0; l < s.cols(); ++l) {
    double p = col_power[static_cast<std::size_t>(l)];
    if (p != 0.0) s.col(l) *= std::pow(t, p);
  }
  return s;
}

namespace {

std::vector<double> column_powers(const std::vector<double>& b, Mode mode) {
  std::vector<double> p(b.size(), 0.0);
  if (mode == Mode::RL)
    for (std::size_t i = 0; i < b.size(); ++i) p[i] = b[i] - 1.0;
  return p;
}

OperatorSamples empty_samples(const std::vector<double>& b, Mode mode,
                              const std::vector<double>& grid, const std::string& method) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty time grid");
  for (double t : grid)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw Error(ErrorKind::InvalidArgument, "time grid must be finite and non-negative");
  const int m = static_cast<int>(b.size());
  OperatorSamples s;
  s.mode = mode;
  s.grid = grid;
  s.values.assign(grid.size(), Mat::Zero(m, m));
  s.col_power = column_powers(b, mode);
  s.method = method;
  return s;
}

// value of S at t = 0 in the stored representation
Mat origin_value(const std::vector<double>& b, Mode mode) {
  const int m = static_cast<int>(b.size());
  Mat s = Mat::Identity(m, m);
  if (mode == Mode::RL)
    for (int l = 0; l < m; ++l) s(l, l) = rgamma(b[static_cast<std::size_t>(l)]);
  return s;
}

double tpow(double t, double p) {
  if (t == 0.0) {
    if (std::fabs(p) < 1e-12) return 1.0;
    return p > 0.0 ? 0.0 : INFINITY;
  }
  return std::pow(t, p);
}

// E^{(k)}_{beta,mu}(lambda x) / k! at many x = t^beta in [0, xmax]. Taylor coefficients are
// built once and reused; falls back to the scalar evaluator when the series would cancel.
std::vector<cplx> kernel_values(double beta, double mu, int k, cplx lambda,
                                const std::vector<double>& x, double xmax) {
  std::vector<cplx> out(x.size());
  const double la = std::abs(lambda);
  std::vector<cplx> a;
  double absum = 0.0, prev = INFINITY;
  int small = 0;
  bool ok = false;
  const double lk = std::lgamma(k + 1.0);
  const cplx ph = la > 0.0 ? lambda / la : cplx(1.0);
  const double lxm = std::log(std::max(la * xmax, 1e-300));
  cplx phase = 1.0;
  for (int i = 0; i < 4000; ++i) {
    double lc = std::lgamma(i + k + 1.0) - std::lgamma(i + 1.0) - lk - lgamma_abs(beta * (i + k) + mu);
    if (i == 0) {
      a.push_back(std::exp(lc));
      absum = std::exp(lc);
      if (la == 0.0) {
        ok = true;
        break;
      }
      prev = absum;
      phase *= ph;
      continue;
    }
    a.push_back(std::exp(lc + i * std::log(la)) * phase);
    double mag = std::exp(lc + i * lxm);
    absum += mag;
    if (mag <= 1e-17 * absum && mag <= prev) {
      if (++small >= 3) {
        ok = true;
        break;
      }
    } else {
      small = 0;
    }
    prev = mag;
    phase *= ph;
  }
  const double ref = std::abs(a.front());
  if (ok && absum <= 1e3 * std::max(1.0, ref)) {
    for (std::size_t q = 0; q < x.size(); ++q) {
      cplx acc = 0.0;
      for (std::size_t i = a.size(); i-- > 0;) acc = acc * x[q] + a[i];
      out[q] = acc;
    }
    return out;
  }
  for (std::size_t q = 0; q < x.size(); ++q) out[q] = ml_kernel({beta, mu}, lambda * x[q], k);
  return out;
}

double max_abs(const Mat& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

void apply_talbot(OperatorSamples& s, const std::vector<double>& b, const Mat& f, std::size_t i) {
  const double t = s.grid[i];
  if (t == 0.0) {
    s.values[i] = origin_value(b, s.mode);
    return;
  }
  Mat v = talbot_invert(b, f, s.mode, t);
  for (int l = 0; l < v.cols(); ++l)
    if (s.col_power[static_cast<std::size_t>(l)] != 0.0)
      v.col(l) *= std::pow(t, -s.col_power[static_cast<std::size_t>(l)]);
  s.values[i] = v;
}

double grid_step(const std::vector<double>& grid) {
  if (grid.size() < 2 || grid.front() != 0.0)
    throw Error(ErrorKind::InvalidArgument, "grid must start at 0 and hold >= 2 points");
  return grid.back() / static_cast<double>(grid.size() - 1);
}

}  // namespace

OperatorSamples series_operator(const std::vector<double>& b, const Mat& f, Mode mode,
                                const std::vector<double>& grid, const SeriesSolveOptions& opt) {
  OperatorSamples out = empty_samples(b, mode, grid, "series");
  const int m = static_cast<int>(b.size());
  const std::size_t n = grid.size();
  const double tmax = *std::max_element(grid.begin(), grid.end());

  SeriesOptions so;
  so.t_max = tmax > 0.0 ? tmax : 1.0;
  so.prune_tol = opt.prune_tol;
  SeriesExpander ex(b, f, mode, so);
  const double beta1 = ex.list().base;
  const cplx lambda = ex.list().lambda;

  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = std::pow(grid[i], beta1);
  const double xmax = std::pow(tmax, beta1);

  std::vector<std::array<double, 3>> last(n, {0.0, 0.0, 0.0});
  const int kmax = opt.fixed_k >= 0 ? opt.fixed_k : opt.k_cap;
  bool converged = opt.fixed_k >= 0;
  int levels = 0;
  std::vector<Mat> lvl(n, Mat::Zero(m, m));

  struct Use {
    int j, l;
    cplx coef;
  };
  std::exception_ptr kernel_failure;
  for (int k = 0; k <= kmax; ++k) {
    try {
      ex.next_level();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TruncationLimit) throw;
      kernel_failure = std::current_exception();
      break;
    }
    ++levels;
    std::map<double, std::vector<Use>> groups;
    const auto& list = ex.list();
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l)
        for (const auto& term : list.entries[j][l][static_cast<std::size_t>(k)]) {
          auto it = groups.lower_bound(term.mu - 1e-12);
          if (it == groups.end() || it->first > term.mu + 1e-12)
            it = groups.emplace(term.mu, std::vector<Use>{}).first;
          it->second.push_back({j, l, term.coef});
        }
    for (auto& v : lvl) v.setZero();
    for (const auto& [mu, uses] : groups) {
      std::vector<cplx> kv;
      try {
        kv = kernel_values(beta1, mu, k, lambda, xs, xmax);
      } catch (const Error&) {
        kernel_failure = std::current_exception();
        break;
      }
      std::map<int, std::vector<double>> pw;  // column -> t^P
      for (const auto& u : uses) {
        auto it = pw.find(u.l);
        if (it == pw.end()) {
          double p = k * beta1 + mu - 1.0 - out.col_power[static_cast<std::size_t>(u.l)];
          if (p < 0.0 && p > -1e-9) p = 0.0;
          std::vector<double> w(n);
          for (std::size_t i = 0; i < n; ++i) w[i] = tpow(grid[i], p);
          it = pw.emplace(u.l, std::move(w)).first;
        }
        const auto& w = it->second;
        for (std::size_t i = 0; i < n; ++i)
          if (w[i] != 0.0) lvl[i](u.j, u.l) += u.coef * kv[i] * w[i];
      }
    }
    if (kernel_failure) break;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.values[i] += lvl[i];
      last[i] = {last[i][1], last[i][2], max_abs(lvl[i])};
      double tail = last[i][0] + last[i][1] + last[i][2];
      worst = std::max(worst, tail / std::max(max_abs(out.values[i]), 1e-300));
    }
    if (opt.fixed_k < 0 && k >= 2 && worst < opt.rel_tol) {
      converged = true;
      break;
    }
    if (ex.live_monomials() == 0) {
      converged = true;
      break;
    }
  }
  out.truncation = levels - 1;
  out.tail.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.tail[i] = last[i][0] + last[i][1] + last[i][2];
    out.error_estimate = std::max(out.error_estimate, out.tail[i]);
  }
  out.info["series_terms"] = std::to_string(ex.list().term_count());
  if (kernel_failure) {
    if (!opt.talbot_fallback) std::rethrow_exception(kernel_failure);
    for (std::size_t i = 0; i < n; ++i) apply_talbot(out, b, f, i);
    std::fill(out.tail.begin(), out.tail.end(), 0.0);
    out.error_estimate = 0.0;
    out.method = "series->talbot";
    try {
      std::rethrow_exception(kernel_failure);
    } catch (const std::exception& e) {
      out.warnings.push_back(std::string("series expansion stopped at level ") +
                             std::to_string(levels - 1) + " (" + e.what() + "); talbot used");
    }
    return out;
  }
  if (!converged) {
    std::size_t replaced = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (grid[i] == 0.0) continue;
      if (out.tail[i] > opt.fallback_tol * std::max(1.0, max_abs(out.values[i]))) {
        if (!opt.talbot_fallback) continue;
        apply_talbot(out, b, f, i);
        out.tail[i] = 0.0;
        ++replaced;
      }
    }
    std::ostringstream os;
    os << "series truncation at K=" << out.truncation << " did not meet " << opt.rel_tol;
    if (replaced) os << "; " << replaced << " points above " << opt.fallback_tol
                     << " recomputed by talbot";
    out.warnings.push_back(os.str());
    if (replaced) {
      out.method = "series+talbot";
      out.info["talbot_points"] = std::to_string(replaced);
      out.error_estimate = *std::max_element(out.tail.begin(), out.tail.end());
    }
  }
  return out;
}

OperatorSamples commensurate_operator(double beta, const Mat& f, Mode mode,
                                      const std::vector<double>& grid, const JordanOptions& jopt) {
  const int m = static_cast<int>(f.rows());
  std::vector<double> b(static_cast<std::size_t>(m), beta);
  OperatorSamples out = empty_samples(b, mode, grid, "commensurate");
  const JordanForm jf = jordan_decompose(f, jopt);
  const double nu = mode == Mode::Caputo ? 1.0 : beta;
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = matrix_ml(beta, nu, grid[i], jf);
  std::ostringstream os;
  os << jf.blocks.size();
  out.info["jordan_blocks"] = os.str();
  return out;
}

bool is_lower_triangular(const Mat& f) {
  const double tol = 1e-14 * f.norm();
  for (int i = 0; i < f.rows(); ++i)
    for (int j = i + 1; j < f.cols(); ++j)
      if (std::abs(f(i, j)) > tol) return false;
  return true;
}

bool is_upper_triangular(const Mat& f) {
  const double tol = 1e-14 * f.norm();
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(f(i, j)) > tol) return false;
  return true;
}

OperatorSamples triangular_operator(const std::vector<double>& b, const Mat& f, Mode mode,
                                    const std::vector<double>& grid) {
  OperatorSamples out = empty_samples(b, mode, grid, "triangular");
  const int m = static_cast<int>(b.size());
  if (f.rows() != m || f.cols() != m)
    throw Error(ErrorKind::InvalidArgument, "order vector and matrix sizes disagree");
  const bool lower = is_lower_triangular(f);
  const bool upper = !lower && is_upper_triangular(f);
  if (!lower && !upper)
    throw Error(ErrorKind::WrongStructure, "triangular solver needs a lower- or upper-triangular matrix");
  const double h = grid_step(grid);
  const std::size_t n = grid.size();
  for (std::size_t i = 1; i < n; ++i)
    if (std::fabs(grid[i] - h * static_cast<double>(i)) > 1e-12 * grid.back())
      throw Error(ErrorKind::InvalidArgument, "triangular solver needs a uniform grid");
  const double tol = 1e-14 * f.norm();

  // Each component is a sum of pieces. A monomial piece c t^q convolves with the kernel
  // t^{b-1} E_{b,b}(f t^b) in closed form: c Gamma(q+1) t^{q+b} E_{b,q+b+1}(f t^b).
  struct Piece {
    bool mono = false;
    cplx c = 0.0;
    double q = 0.0;
    SampledFunction fn;
  };
  auto ml_piece = [&](int k, double nu, cplx scale, double power) {
    const double bk = b[static_cast<std::size_t>(k)];
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = scale * ml({bk, nu}, f(k, k) * std::pow(grid[i], bk));
    return SampledFunction(h, std::move(v), power);
  };
  // kernel t^{b-1} E_{b,b}(f t^b) split the same way for the numeric convolutions
  std::vector<std::vector<SampledFunction>> kk(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double bk = b[static_cast<std::size_t>(k)];
    const cplx fk = f(k, k);
    cplx fp = 1.0;
    int i = 0;
    for (; i < 8 && (i == 0 || (fk != 0.0 && i * bk - 1.0 < 2.0)); ++i) {
      const double q = (i + 1) * bk - 1.0;
      kk[static_cast<std::size_t>(k)].emplace_back(h, std::vector<cplx>(n, fp * rgamma(q + 1.0)), q);
      fp *= fk;
    }
    if (fk != 0.0) kk[static_cast<std::size_t>(k)].push_back(ml_piece(k, (i + 1) * bk, fp, (i + 1) * bk - 1.0));
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  if (upper) std::reverse(order.begin(), order.end());

  for (int l = 0; l < m; ++l) {
    std::vector<std::vector<Piece>> u(static_cast<std::size_t>(m));
    for (int k : order) {
      const double bk = b[static_cast<std::size_t>(k)];
      auto& pieces = u[static_cast<std::size_t>(k)];
      if (k == l) {
        // leading Taylor monomials exactly, remainder f^J t^{q0+Jb} E_{b,q0+Jb+1}(f t^b)
        const double q0 = mode == Mode::Caputo ? 0.0 : bk - 1.0;
        const cplx fk = f(k, k);
        int terms = 1;
        if (fk != 0.0)
          while (terms < 8 && q0 + terms * bk < 2.0) ++terms;
        cplx fp = 1.0;
        for (int i = 0; i < terms; ++i) {
          Piece mono;
          mono.mono = true;
          mono.q = q0 + i * bk;
          mono.c = fp * rgamma(mono.q + 1.0);
          pieces.push_back(mono);
          fp *= fk;
        }
        if (fk != 0.0) {
          Piece rest;
          const double q = q0 + terms * bk;
          rest.fn = ml_piece(k, q + 1.0, fp, q);
          pieces.push_back(std::move(rest));
        }
      }
      for (int j = 0; j < m; ++j) {
        bool dep = lower ? j < k : j > k;
        if (!dep || std::abs(f(k, j)) <= tol) continue;
        for (const Piece& pc : u[static_cast<std::size_t>(j)]) {
          Piece np;
          if (pc.mono)
            np.fn = ml_piece(k, pc.q + bk + 1.0, f(k, j) * pc.c * gamma_fn(pc.q + 1.0), pc.q + bk);
          else
            for (const auto& kp : kk[static_cast<std::size_t>(k)]) {
              SampledFunction c = f(k, j) * convolve(kp, pc.fn);
              if (np.fn.size() == 0) np.fn = std::move(c);
              else np.fn += c;
            }
          pieces.push_back(std::move(np));
        }
      }
    }
    const double target = out.col_power[static_cast<std::size_t>(l)];
    for (int k = 0; k < m; ++k) {
      for (const Piece& pc : u[static_cast<std::size_t>(k)]) {
        if (pc.mono) {
          for (std::size_t i = 0; i < n; ++i) out.values[i](k, l) += pc.c * tpow(grid[i], pc.q - target);
          continue;
        }
        SampledFunction r = reweight(pc.fn, target);
        for (std::size_t i = 0; i < n; ++i) out.values[i](k, l) += r.values[i];
      }
    }
  }
  return out;
}

OperatorSamples talbot_operator(const std::vector<double>& b, const Mat& f, Mode mode,
                                const std::vector<double>& grid) {
  OperatorSamples out = empty_samples(b, mode, grid, "talbot");
  for (std::size_t i = 0; i < grid.size(); ++i) apply_talbot(out, b, f, i);
  return out;
}

RationalReduction reduce_rational(const std::vector<std::pair<long, long>>& q) {
  if (q.empty()) throw Error(ErrorKind::InvalidArgument, "empty order list");
  RationalReduction r;
  std::vector<std::pair<long, long>> red;
  for (auto [num, den] : q) {
    if (num <= 0 || den <= 0)
      throw Error(ErrorKind::RequiresRational, "orders must be positive fractions q/p");
    long g = std::gcd(num, den);
    red.emplace_back(num / g, den / g);
    r.p = std::lcm(r.p, den / g);
    if (r.p > 1000000) throw Error(ErrorKind::InvalidArgument, "common denominator exceeds 10^6");
  }
  for (auto [num, den] : red) {
    long nj = num * (r.p / den);
    r.n.push_back(nj);
    r.n_total += nj;
  }
  return r;
}

RationalReduction reduce_rational(const MultiOrder& b) {
  if (!b.is_rational())
    throw Error(ErrorKind::RequiresRational,
                "rational reduction needs exact rational orders (write them as q/p)");
  return reduce_rational(b.exact);
}

Vec AugmentedSystem::lift(const Vec& phi, Mode mode) const {
  Vec big = Vec::Zero(matrix.rows());
  const auto& pos = mode == Mode::Caputo ? heads : lasts;
  for (std::size_t j = 0; j < pos.size(); ++j) big(pos[j]) = phi(static_cast<Eigen::Index>(j));
  return big;
}

Vec AugmentedSystem::extract(const Vec& big) const {
  Vec out(static_cast<Eigen::Index>(heads.size()));
  for (std::size_t j = 0; j < heads.size(); ++j) out(static_cast<Eigen::Index>(j)) = big(heads[j]);
  return out;
}

AugmentedSystem build_augmented(const MultiOrder& b, const Mat& f, long p_override) {
  RationalReduction red = reduce_rational(b);
  const int m = b.size();
  if (f.rows() != m || f.cols() != m)
    throw Error(ErrorKind::InvalidArgument, "order vector and matrix sizes disagree");
  if (p_override > 0) {
    if (p_override % red.p != 0)
      throw Error(ErrorKind::InvalidArgument, "p override must be a multiple of the reduced denominator");
    long factor = p_override / red.p;
    red.p = p_override;
    red.n_total = 0;
    for (auto& nj : red.n) {
      nj *= factor;
      red.n_total += nj;
    }
  }
  if (red.n_total > 4096)
    throw Error(ErrorKind::InvalidArgument,
                "augmented system of size " + std::to_string(red.n_total) + " exceeds 4096");
  AugmentedSystem a;
  a.p = red.p;
  a.order = 1.0 / static_cast<double>(red.p);
  const int big = static_cast<int>(red.n_total);
  a.matrix = Mat::Zero(big, big);
  int off = 0;
  for (int j = 0; j < m; ++j) {
    a.heads.push_back(off);
    off += static_cast<int>(red.n[static_cast<std::size_t>(j)]);
    a.lasts.push_back(off - 1);
  }
  for (int j = 0; j < m; ++j) {
    for (int i = a.heads[j]; i < a.lasts[j]; ++i) a.matrix(i, i + 1) = 1.0;
    for (int k = 0; k < m; ++k) a.matrix(a.lasts[j], a.heads[k]) += f(j, k);
  }
  return a;
}

OperatorSamples rational_operator(const MultiOrder& b, const Mat& f, Mode mode,
                                  const std::vector<double>& grid, const RationalOptions& opt) {
  const AugmentedSystem aug = build_augmented(b, f);
  const std::string method = opt.partial_fractions ? "rational-residues" : "rational";
  OperatorSamples out = empty_samples(b.values, mode, grid, method);
  const int m = b.size();
  const int big = static_cast<int>(aug.matrix.rows());
  out.info["augmented_size"] = std::to_string(big);
  out.info["p"] = std::to_string(aug.p);

  JordanForm jf;
  try {
    jf = jordan_decompose(aug.matrix, opt.jordan);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IllConditioned || !opt.talbot_fallback) throw;
    OperatorSamples t = talbot_operator(b.values, f, mode, grid);
    t.info = out.info;
    t.method = "rational->talbot";
    t.warnings.push_back(std::string("augmented Jordan form rejected (") + e.what() +
                         "); talbot used instead");
    return t;
  }
  const double beta = aug.order;
  Mat mh(m, big), minv_c(big, m);
  const auto& cols = mode == Mode::Caputo && !opt.partial_fractions ? aug.heads : aug.lasts;
  for (int j = 0; j < m; ++j) {
    mh.row(j) = jf.transform.row(aug.heads[static_cast<std::size_t>(j)]);
    minv_c.col(j) = jf.inverse.col(cols[static_cast<std::size_t>(j)]);
  }
  const Mat origin = origin_value(b.values, mode);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (t == 0.0) {
      out.values[i] = origin;
      continue;
    }
    const double tb = std::pow(t, beta);
    if (!opt.partial_fractions) {
      const double nu = mode == Mode::Caputo ? 1.0 : beta;
      Mat inner = jordan_inner(jf, [&](int r, cplx lam) -> cplx {
        return std::pow(tb, r) * ml_kernel({beta, nu}, lam * tb, r);
      });
      Mat s = mh * inner * minv_c;
      if (mode == Mode::RL)
        for (int l = 0; l < m; ++l) s.col(l) *= std::pow(t, beta - b[l]);
      out.values[i] = s;
      continue;
    }
    // residue form: sum over blocks and powers of C * t^{nu/p - beta_k} E^{(nu-1)}(lambda t^{1/p})/(nu-1)!
    Mat s = Mat::Zero(m, m);
    int off = 0;
    for (const auto& blk : jf.blocks) {
      for (int r = 0; r < blk.size; ++r) {
        for (int l = 0; l < m; ++l) {
          const double bl = b[l];
          const double mu = mode == Mode::Caputo ? beta - bl + 1.0 : beta;
          cplx ker = ml_kernel_t(beta, mu, r, blk.lambda, t);
          if (mode == Mode::RL) ker *= std::pow(t, 1.0 - bl);
          for (int j = 0; j < m; ++j) {
            cplx c = 0.0;
            for (int q = 0; q + r < blk.size; ++q) c += mh(j, off + q) * minv_c(off + q + r, l);
            s(j, l) += c * ker;
          }
        }
      }
      off += blk.size;
    }
    out.values[i] = s;
  }
  return out;
}

Trajectory duhamel(const SystemSpec& spec, const OperatorSamples& s) {
  spec.validate();
  const int m = spec.dim();
  const std::size_t n = s.grid.size();
  Trajectory tr;
  tr.grid = s.grid;
  tr.method = s.method;
  tr.truncation = s.truncation;
  tr.error_estimate = s.error_estimate;
  tr.tail = s.tail;
  tr.warnings = s.warnings;
  tr.info = s.info;
  tr.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.mode == Mode::RL && s.grid[i] == 0.0) {
      tr.states[i] = spec.initial;  // the t = 0 row holds (J^{1-B}U)(0) = Phi
      continue;
    }
    tr.states[i] = s.full(i) * spec.initial;
  }
  if (!spec.forcing) return tr;

  const double h = grid_step(s.grid);
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "forcing needs a grid of >= 3 points");
  std::vector<std::vector<cplx>> hv(static_cast<std::size_t>(m), std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Vec v = spec.forcing(s.grid[i]);
    if (v.size() != m || !v.allFinite()) {
      std::ostringstream os;
      os << "forcing is not finite (or has wrong size) at t = " << s.grid[i];
      throw Error(ErrorKind::InvalidForcing, os.str());
    }
    for (int j = 0; j < m; ++j) hv[static_cast<std::size_t>(j)][i] = v(j);
  }
  for (int l = 0; l < m; ++l) {
    const auto& hl = hv[static_cast<std::size_t>(l)];
    if (std::all_of(hl.begin(), hl.end(), [](cplx c) { return c == 0.0; })) continue;
    const double bl = spec.orders[l];
    SampledFunction hf(h, hl, 0.0);
    SampledFunction g = hf;
    cplx h0 = 0.0;
    if (spec.mode == Mode::Caputo && bl < 1.0) {
      h0 = hl[0];
      SampledFunction shifted = hf;
      for (auto& v : shifted.values) v -= h0;
      g = rl_deriv(shifted, 1.0 - bl);
    }
    for (int j = 0; j < m; ++j) {
      std::vector<cplx> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = s.values[i](j, l);
      SampledFunction sjl(h, std::move(col), s.col_power[static_cast<std::size_t>(l)]);
      SampledFunction c = convolve(sjl, g);
      if (h0 != 0.0) c += h0 * frac_integral(sjl, bl);
      for (std::size_t i = 0; i < n; ++i) {
        if (spec.mode == Mode::RL && s.grid[i] == 0.0) continue;
        tr.states[i](j) += c.at(i);
      }
    }
  }
  tr.info["duhamel"] = "yes";
  return tr;
}

Trajectory solve_series(const SystemSpec& spec, const std::vector<double>& grid,
                        const SeriesSolveOptions& opt) {
  spec.validate();
  return duhamel(spec, series_operator(spec.orders.values, spec.matrix, spec.mode, grid, opt));
}

Trajectory solve_commensurate(const SystemSpec& spec, const std::vector<double>& grid) {
  spec.validate();
  if (!spec.orders.all_equal())
    throw Error(ErrorKind::InvalidArgument, "commensurate solver needs equal orders");
  return duhamel(spec, commensurate_operator(spec.orders[0], spec.matrix, spec.mode, grid));
}

Trajectory solve_rational(const SystemSpec& spec, const std::vector<double>& grid,
                          const RationalOptions& opt) {
  spec.validate();
  return duhamel(spec, rational_operator(spec.orders, spec.matrix, spec.mode, grid, opt));
}

Trajectory solve_triangular(const SystemSpec& spec, const std::vector<double>& grid) {
  spec.validate();
  return duhamel(spec, triangular_operator(spec.orders.values, spec.matrix, spec.mode, grid));
}

SolutionOperator SolutionOperator::series(const std::vector<double>& b, const Mat& f, Mode mode,
                                          const SeriesSolveOptions& opt) {
  SolutionOperator op;
  op.method_ = "series";
  op.sampler_ = [=](const std::vector<double>& g) { return series_operator(b, f, mode, g, opt); };
  return op;
}

SolutionOperator SolutionOperator::commensurate(double beta, const Mat& f, Mode mode) {
  SolutionOperator op;
  op.method_ = "commensurate";
  op.sampler_ = [=](const std::vector<double>& g) {
    return commensurate_operator(beta, f, mode, g);
  };
  return op;
}

SolutionOperator SolutionOperator::rational(const MultiOrder& b, const Mat& f, Mode mode,
                                            const RationalOptions& opt) {
  SolutionOperator op;
  op.method_ = "rational";
  op.sampler_ = [=](const std::vector<double>& g) {
    return rational_operator(b, f, mode, g, opt);
  };
  return op;
}

SolutionOperator SolutionOperator::talbot(const std::vector<double>& b, const Mat& f, Mode mode) {
  SolutionOperator op;
  op.method_ = "talbot";
  op.sampler_ = [=](const std::vector<double>& g) { return talbot_operator(b, f, mode, g); };
  return op;
}

Mat SolutionOperator::evaluate(double t) const { return sampler_({t}).full(0); }

}  // namespace fracsys
