#include "fracsys/pseudo_spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <sstream>

#include "fracsys/errors.hpp"
#include "fracsys/solver_core.hpp"

namespace fracsys {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// one column, in place through a scratch buffer; sign = FFTW_FORWARD or FFTW_BACKWARD
void transform_columns(Mat& a, int sign) {
  const int n = static_cast<int>(a.rows());
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
  fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  for (int c = 0; c < a.cols(); ++c) {
    for (int i = 0; i < n; ++i) {
      buf[i][0] = a(i, c).real();
      buf[i][1] = a(i, c).imag();
    }
    fftw_execute(plan);
    for (int i = 0; i < n; ++i) a(i, c) = cplx(buf[i][0], buf[i][1]);
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
}

}  // namespace

GridField::GridField(double len, std::size_t n, int m) : length(len), data(Mat::Zero(static_cast<Eigen::Index>(n), m)) {}

void GridField::validate() const {
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorKind::InvalidArgument, "grid length must be positive");
  if (!power_of_two(points()))
    throw Error(ErrorKind::InvalidArgument, "grid size must be a power of two");
  if (!data.allFinite()) throw Error(ErrorKind::InvalidArgument, "grid field has non-finite values");
}

double frequency(std::size_t k, std::size_t n, double length) {
  const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
  return kTwoPi * kk / length;
}

Mat forward_transform(const Mat& data) {
  Mat a = data;
  transform_columns(a, FFTW_FORWARD);
  return a;
}

Mat inverse_transform(const Mat& coeffs) {
  Mat a = coeffs;
  transform_columns(a, FFTW_BACKWARD);
  return a / static_cast<double>(a.rows());
}

Mat mode_operator(const Mat& f, const MultiOrder& b, double t, const SpectralOptions& opt) {
  const std::vector<double> g{t};
  SpectralMethod method = opt.method;
  if (method == SpectralMethod::Auto) {
    if (b.all_equal())
      method = SpectralMethod::Commensurate;
    else if (b.is_rational() && reduce_rational(b).p <= 64)
      method = SpectralMethod::Rational;
    else
      method = SpectralMethod::Series;
  }
  switch (method) {
    case SpectralMethod::Commensurate:
      if (!b.all_equal()) throw Error(ErrorKind::InvalidArgument, "commensurate solver needs equal orders");
      return commensurate_operator(b[0], f, opt.mode, g).full(0);
    case SpectralMethod::Rational:
      return rational_operator(b, f, opt.mode, g).full(0);
    case SpectralMethod::Triangular: {
      auto s = triangular_operator(b.values, f, opt.mode, uniform_grid(t, opt.triangular_steps));
      return s.full(s.grid.size() - 1);
    }
    case SpectralMethod::Talbot:
      return talbot_operator(b.values, f, opt.mode, g).full(0);
    default:
      return series_operator(b.values, f, opt.mode, g).full(0);
  }
}

SpectralResult solve_on_grid(const SymbolFn& symbol, const MultiOrder& b, const GridField& initial,
                             double t, const SpectralOptions& opt) {
  initial.validate();
  b.validate();
  const int m = b.size();
  if (initial.components() != m)
    throw Error(ErrorKind::InvalidArgument, "grid field and order vector sizes disagree");
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "solve time must be positive");
  const std::size_t n = initial.points();

  SpectralResult res;
  res.field = GridField(initial.length, n, m);
  const Mat coeffs = forward_transform(initial.data);
  Mat out = Mat::Zero(coeffs.rows(), coeffs.cols());
  for (std::size_t k = 0; k < n; ++k) {
    const Vec c = coeffs.row(static_cast<Eigen::Index>(k)).transpose();
    if (c.cwiseAbs().maxCoeff() == 0.0) continue;
    const double xi = frequency(k, n, initial.length);
    const Mat f = symbol(xi);
    if (f.rows() != m || f.cols() != m)
      throw Error(ErrorKind::InvalidArgument, "symbol returned a matrix of the wrong size");
    if (!f.allFinite()) {
      bool excluded = false;
      for (double e : opt.excluded)
        if (std::fabs(e - xi) <= 1e-12 * std::max(1.0, std::fabs(xi))) excluded = true;
      if (!excluded) {
        std::ostringstream os;
        os << "symbol is not finite at frequency " << xi;
        throw SingularSymbolError(os.str(), xi);
      }
      std::ostringstream os;
      os << "symbol undefined at excluded frequency " << xi << "; mode held constant";
      res.warnings.push_back(os.str());
      out.row(static_cast<Eigen::Index>(k)) = c.transpose();
      continue;
    }
    out.row(static_cast<Eigen::Index>(k)) = (mode_operator(f, b, t, opt) * c).transpose();
  }
  res.field.data = inverse_transform(out);
  return res;
}

}  // namespace fracsys
