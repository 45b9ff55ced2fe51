#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracsys/system.hpp"

namespace fracsys {

// m complex components on a 1-D periodic grid of n points over [0, length)
struct GridField {
  double length = 2.0 * 3.14159265358979323846;
  Mat data;  // n x m

  GridField() = default;
  GridField(double len, std::size_t n, int m);
  std::size_t points() const { return static_cast<std::size_t>(data.rows()); }
  int components() const { return static_cast<int>(data.cols()); }
  double x(std::size_t i) const { return length * static_cast<double>(i) / static_cast<double>(points()); }
  void validate() const;
};

// discrete angular frequency of FFT bin k (negative frequencies for k >= n/2)
double frequency(std::size_t k, std::size_t n, double length);

using SymbolFn = std::function<Mat(double xi)>;

enum class SpectralMethod { Auto, Series, Commensurate, Rational, Triangular, Talbot };

struct SpectralOptions {
  SpectralMethod method = SpectralMethod::Auto;
  Mode mode = Mode::Caputo;
  std::vector<double> excluded{0.0};  // frequencies where a non-finite symbol is tolerated
  std::size_t triangular_steps = 1024;
};

struct SpectralResult {
  GridField field;
  std::vector<std::string> warnings;
};

// forward DFT, per-mode S(t, xi) applied to the coefficients, inverse DFT (1/n on the inverse)
SpectralResult solve_on_grid(const SymbolFn& symbol, const MultiOrder& b, const GridField& initial,
                             double t, const SpectralOptions& opt = {});

// coefficient arrays in FFT order (n x m), exposed for per-mode checks
Mat forward_transform(const Mat& data);
Mat inverse_transform(const Mat& coeffs);

// per-mode solution operator S(t) for the symbol value f
Mat mode_operator(const Mat& f, const MultiOrder& b, double t, const SpectralOptions& opt);

}  // namespace fracsys
