#pragma once

#include <functional>
#include <vector>

#include "fracsys/system.hpp"

namespace fracsys {

// Talbot-type contour s(th) = sigma + (M/t)(-0.6122 + 0.5017 th cot(0.6407 th) + 0.2645 i th),
// midpoint rule in th on (-pi, pi).
struct ContourParams {
  int node_count = 48;
  double scale = -1.0;  // M; < 0 picks min(node_count, 48)
  double shift = -1.0;  // sigma; < 0 places every possible pole left of the contour
};

using MatSymbol = std::function<Mat(cplx)>;

// inverse Laplace transform of an arbitrary matrix symbol at t > 0
Mat talbot_invert_symbol(const MatSymbol& symbol, int m, double t, const ContourParams& p,
                         double shift);
cplx talbot_invert_scalar(const std::function<cplx(cplx)>& symbol, double t,
                          const ContourParams& p, double shift);

// S(t) = L^{-1}[(I s^B - F)^{-1} I s^{B-1}] (Caputo) or L^{-1}[(I s^B - F)^{-1}] (RL).
// Retries with a perturbed shift when a node hits a singular resolvent.
Mat talbot_invert(const std::vector<double>& b, const Mat& f, Mode mode, double t,
                  const ContourParams& p = {});

// Full trajectory U(t) = S(t) Phi for a homogeneous system; t = 0 row holds Phi.
Trajectory talbot_solve(const SystemSpec& spec, const std::vector<double>& grid,
                        const ContourParams& p = {});

// Fractional Adams predictor-corrector (Caputo), per-component order weights.
// Runs with step h / refine and samples back onto the requested grid.
Trajectory adams_pc(const SystemSpec& spec, const std::vector<double>& grid, int refine = 1);

}  // namespace fracsys
