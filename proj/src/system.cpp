#include "fracsys/system.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "fracsys/errors.hpp"

namespace fracsys {

MultiOrder::MultiOrder(std::vector<double> v) : values(std::move(v)) {}

MultiOrder MultiOrder::rational(const std::vector<std::pair<long, long>>& q) {
  MultiOrder b;
  for (auto [num, den] : q) {
    if (den <= 0 || num <= 0)
      throw Error(ErrorKind::InvalidOrder, "rational order needs positive numerator and denominator");
    long g = std::gcd(num, den);
    b.exact.emplace_back(num / g, den / g);
    b.values.push_back(static_cast<double>(num) / static_cast<double>(den));
  }
  return b;
}

bool MultiOrder::all_equal() const {
  for (double v : values)
    if (v != values.front()) return false;
  return true;
}

void MultiOrder::validate() const {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "empty order vector");
  for (double v : values)
    if (!(v > 0.0 && v <= 1.0)) {
      std::ostringstream os;
      os << "order " << v << " outside (0,1]";
      throw Error(ErrorKind::InvalidOrder, os.str());
    }
  if (!exact.empty() && exact.size() != values.size())
    throw Error(ErrorKind::InvalidArgument, "rational order list has the wrong length");
}

void SystemSpec::validate() const {
  orders.validate();
  const int m = dim();
  if (matrix.rows() != m || matrix.cols() != m)
    throw Error(ErrorKind::InvalidArgument, "system matrix must be " + std::to_string(m) + "x" +
                                                std::to_string(m));
  if (initial.size() != m)
    throw Error(ErrorKind::InvalidArgument,
                "initial vector must have " + std::to_string(m) + " entries");
  if (!matrix.allFinite() || !initial.allFinite())
    throw Error(ErrorKind::InvalidArgument, "non-finite system data");
}

std::vector<double> uniform_grid(double t_max, std::size_t steps) {
  if (!(t_max > 0.0) || steps < 1)
    throw Error(ErrorKind::InvalidArgument, "grid needs t_max > 0 and at least one step");
  std::vector<double> g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    g[i] = t_max * static_cast<double>(i) / static_cast<double>(steps);
  return g;
}

std::vector<cplx> Trajectory::component(int j) const {
  std::vector<cplx> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = states[i](j);
  return out;
}

double max_deviation(const Trajectory& a, const Trajectory& b, std::size_t from) {
  if (a.states.size() != b.states.size())
    throw Error(ErrorKind::IncompatibleGrids, "trajectories have different lengths");
  double m = 0.0;
  for (std::size_t i = from; i < a.states.size(); ++i)
    m = std::max(m, (a.states[i] - b.states[i]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace fracsys
