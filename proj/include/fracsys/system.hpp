#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fracsys/types.hpp"

namespace fracsys {

// Order vector B; each entry in (0,1]. Rational entries keep their exact (q, p) pair.
struct MultiOrder {
  std::vector<double> values;
  std::vector<std::pair<long, long>> exact;  // empty unless every order is an exact rational

  MultiOrder() = default;
  explicit MultiOrder(std::vector<double> v);
  static MultiOrder rational(const std::vector<std::pair<long, long>>& q);

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  bool is_rational() const { return !exact.empty(); }
  bool all_equal() const;
  void validate() const;
};

using Forcing = std::function<Vec(double)>;

struct SystemSpec {
  MultiOrder orders;
  Mat matrix;
  Vec initial;
  Forcing forcing;  // empty: homogeneous
  Mode mode = Mode::Caputo;

  int dim() const { return orders.size(); }
  void validate() const;
};

// Uniform grid t_i = i * t_max / steps, i = 0..steps.
std::vector<double> uniform_grid(double t_max, std::size_t steps);

struct Trajectory {
  std::vector<double> grid;
  std::vector<Vec> states;
  std::string method;
  int truncation = -1;
  double error_estimate = 0.0;
  std::vector<double> tail;  // per-t truncation estimate (series)
  std::vector<std::string> warnings;
  std::map<std::string, std::string> info;

  int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  // component j as a sampled column
  std::vector<cplx> component(int j) const;
};

// sup over grid indices >= from, all components
double max_deviation(const Trajectory& a, const Trajectory& b, std::size_t from = 0);

}  // namespace fracsys
