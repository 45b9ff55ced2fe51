#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace fracsys {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

enum class Mode { Caputo, RL };

inline const char* mode_name(Mode m) { return m == Mode::Caputo ? "caputo" : "rl"; }

}  // namespace fracsys
