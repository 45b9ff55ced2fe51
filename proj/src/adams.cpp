#include <cmath>
#include <sstream>

#include "fracsys/errors.hpp"
#include "fracsys/oracles.hpp"

// Product-rectangle predictor, product-trapezoid corrector (one sweep each).
// Gamma values come from std::tgamma; no Mittag-Leffler evaluations.

namespace fracsys {

Trajectory adams_pc(const SystemSpec& spec, const std::vector<double>& grid, int refine) {
  spec.validate();
  if (spec.mode != Mode::Caputo)
    throw Error(ErrorKind::InvalidArgument, "adams_pc integrates Caputo systems only");
  if (grid.size() < 2 || grid.front() != 0.0)
    throw Error(ErrorKind::InvalidArgument, "adams_pc needs a grid starting at 0 with >= 2 points");
  if (refine < 1) throw Error(ErrorKind::InvalidArgument, "refinement factor must be >= 1");
  const std::size_t steps = grid.size() - 1;
  const double coarse = grid.back() / static_cast<double>(steps);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::fabs(grid[i] - grid[i - 1] - coarse) > 1e-12 * coarse * static_cast<double>(i))
      throw Error(ErrorKind::InvalidArgument, "adams_pc needs a uniform grid");

  const int m = spec.dim();
  const std::size_t n_steps = steps * static_cast<std::size_t>(refine);
  const double h = coarse / refine;
  const Mat& f = spec.matrix;

  std::vector<std::vector<double>> bw(m), aw(m);
  std::vector<double> cp(m), cc(m), alpha(m);
  for (int j = 0; j < m; ++j) {
    const double a = spec.orders[j];
    alpha[j] = a;
    cp[j] = std::pow(h, a) / std::tgamma(a + 1.0);
    cc[j] = std::pow(h, a) / std::tgamma(a + 2.0);
    bw[j].resize(n_steps + 1);
    aw[j].resize(n_steps + 1);
    for (std::size_t d = 0; d <= n_steps; ++d) {
      double dd = static_cast<double>(d);
      bw[j][d] = std::pow(dd + 1.0, a) - std::pow(dd, a);
      aw[j][d] = std::pow(dd + 2.0, a + 1.0) + std::pow(dd, a + 1.0) - 2.0 * std::pow(dd + 1.0, a + 1.0);
    }
  }

  auto rhs = [&](const Vec& y, double t) -> Vec {
    Vec r = f * y;
    if (spec.forcing) r += spec.forcing(t);
    return r;
  };

  // history of right-hand sides, split by component for contiguous sums
  std::vector<std::vector<cplx>> hist(m, std::vector<cplx>(n_steps + 1));
  Vec y = spec.initial;
  Vec f0 = rhs(y, 0.0);
  for (int j = 0; j < m; ++j) hist[j][0] = f0(j);

  Trajectory tr;
  tr.grid = grid;
  tr.method = "adams";
  tr.states.reserve(grid.size());
  tr.states.push_back(y);
  tr.info["refine"] = std::to_string(refine);

  Vec yp(m), ynew(m);
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double tn1 = h * static_cast<double>(n + 1);
    const double nn = static_cast<double>(n);
    std::vector<cplx> corr(m);
    for (int j = 0; j < m; ++j) {
      const auto& hj = hist[j];
      const auto& b = bw[j];
      const auto& a = aw[j];
      cplx sp = 0.0, sc = 0.0;
      for (std::size_t k = 0; k <= n; ++k) sp += b[n - k] * hj[k];
      for (std::size_t k = 1; k <= n; ++k) sc += a[n - k] * hj[k];
      const double al = alpha[j];
      double a0 = std::pow(nn, al + 1.0) - (nn - al) * std::pow(nn + 1.0, al);
      sc += a0 * hj[0];
      yp(j) = spec.initial(j) + cp[j] * sp;
      corr[j] = sc;
    }
    Vec fp = rhs(yp, tn1);
    for (int j = 0; j < m; ++j) ynew(j) = spec.initial(j) + cc[j] * (fp(j) + corr[j]);
    if (!ynew.allFinite()) {
      std::ostringstream os;
      os << "non-finite state in predictor-corrector at step " << n + 1;
      throw BlowUpError(os.str(), n + 1);
    }
    Vec fn = rhs(ynew, tn1);
    for (int j = 0; j < m; ++j) hist[j][n + 1] = fn(j);
    if ((n + 1) % static_cast<std::size_t>(refine) == 0) tr.states.push_back(ynew);
  }
  return tr;
}

}  // namespace fracsys
