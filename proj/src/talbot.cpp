#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "fracsys/errors.hpp"
#include "fracsys/oracles.hpp"

// Independent of the Mittag-Leffler and series machinery by construction:
// only std::pow on complex numbers and dense linear solves are used here.

namespace fracsys {

namespace {

constexpr double kPi = std::numbers::pi;

struct Node {
  cplx s, ds;
};

std::vector<Node> contour_nodes(double t, const ContourParams& p, double shift) {
  const int n = p.node_count;
  if (n < 8 || n % 2 != 0)
    throw Error(ErrorKind::InvalidArgument, "Talbot node count must be even and >= 8");
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "Talbot inversion needs t > 0");
  const double m = p.scale > 0.0 ? p.scale : std::min(n, 48);
  const double h = 2.0 * kPi / n;
  std::vector<Node> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double th = -kPi + (k + 0.5) * h;
    double a = 0.6407 * th;
    double cot = std::cos(a) / std::sin(a);
    double sn = std::sin(a);
    cplx s = shift + (m / t) * cplx(-0.6122 + 0.5017 * th * cot, 0.2645 * th);
    cplx ds = (m / t) * cplx(0.5017 * (cot - a / (sn * sn)), 0.2645);
    out.push_back({s, ds});
  }
  return out;
}

// Poles of (I s^B - F)^{-1} satisfy s^{beta_j} in the Gershgorin disk of row j for some j.
// Map each disk boundary back through the principal root and shift the contour until every
// image point lies to its left.
double default_shift(const std::vector<double>& b, const Mat& f, double t, const ContourParams& p) {
  const double scale = (p.scale > 0.0 ? p.scale : std::min(p.node_count, 48)) / t;
  double sh = 0.0;
  const int m = static_cast<int>(b.size());
  for (int j = 0; j < m; ++j) {
    double r = 0.0;
    for (int l = 0; l < m; ++l)
      if (l != j) r += std::abs(f(j, l));
    const cplx c = f(j, j);
    const int samples = r > 0.0 ? 256 : 1;
    for (int q = 0; q < samples; ++q) {
      const cplx w = c + r * std::polar(1.0, 2.0 * kPi * q / samples);
      if (std::abs(w) == 0.0 || std::fabs(std::arg(w)) >= b[j] * kPi) continue;
      const cplx pole = std::pow(w, 1.0 / b[j]);
      double th = pole.imag() / (0.2645 * scale);
      th = std::clamp(th, -0.95 * kPi, 0.95 * kPi);
      const double edge = th == 0.0 ? 0.5017 / 0.6407 : 0.5017 * th / std::tan(0.6407 * th);
      const double need = pole.real() - scale * (-0.6122 + edge) + 2.0 / t;
      sh = std::max(sh, need);
    }
  }
  return sh;
}

}  // namespace

Mat talbot_invert_symbol(const MatSymbol& symbol, int m, double t, const ContourParams& p,
                         double shift) {
  const auto nodes = contour_nodes(t, p, shift);
  Mat acc = Mat::Zero(m, m);
  for (const auto& nd : nodes) acc += std::exp(nd.s * t) * nd.ds * symbol(nd.s);
  const double h = 2.0 * kPi / p.node_count;
  return acc * (h / (2.0 * kPi * cplx(0.0, 1.0)));
}

cplx talbot_invert_scalar(const std::function<cplx(cplx)>& symbol, double t,
                          const ContourParams& p, double shift) {
  const auto nodes = contour_nodes(t, p, shift);
  cplx acc = 0.0;
  for (const auto& nd : nodes) acc += std::exp(nd.s * t) * nd.ds * symbol(nd.s);
  const double h = 2.0 * kPi / p.node_count;
  return acc * (h / (2.0 * kPi * cplx(0.0, 1.0)));
}

Mat talbot_invert(const std::vector<double>& b, const Mat& f, Mode mode, double t,
                  const ContourParams& p) {
  const int m = static_cast<int>(b.size());
  if (f.rows() != m || f.cols() != m)
    throw Error(ErrorKind::InvalidArgument, "order vector and matrix sizes disagree");
  double shift = p.shift >= 0.0 ? p.shift : default_shift(b, f, t, p);
  auto resolvent = [&](cplx s) -> Mat {
    Mat a = -f;
    for (int j = 0; j < m; ++j) a(j, j) += std::pow(s, b[j]);
    Eigen::PartialPivLU<Mat> lu(a);
    if (!(lu.rcond() > 1e-13)) {
      std::ostringstream os;
      os << "singular resolvent at contour node s = " << s;
      throw Error(ErrorKind::NodeCollision, os.str());
    }
    Mat rhs = Mat::Zero(m, m);
    for (int j = 0; j < m; ++j)
      rhs(j, j) = mode == Mode::Caputo ? std::pow(s, b[j] - 1.0) : cplx(1.0);
    return lu.solve(rhs);
  };
  for (int attempt = 0;; ++attempt) {
    try {
      return talbot_invert_symbol(resolvent, m, t, p, shift);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NodeCollision || attempt >= 3) throw;
      shift = 1.1 * shift + 0.05;
    }
  }
}

Trajectory talbot_solve(const SystemSpec& spec, const std::vector<double>& grid,
                        const ContourParams& p) {
  spec.validate();
  if (spec.forcing)
    throw Error(ErrorKind::InvalidArgument, "Talbot trajectory supports homogeneous systems only");
  Trajectory tr;
  tr.grid = grid;
  tr.method = "talbot";
  tr.states.reserve(grid.size());
  for (double t : grid) {
    if (t == 0.0) {
      tr.states.push_back(spec.initial);
      continue;
    }
    Mat s = talbot_invert(spec.orders.values, spec.matrix, spec.mode, t, p);
    tr.states.push_back(s * spec.initial);
  }
  return tr;
}

}  // namespace fracsys
