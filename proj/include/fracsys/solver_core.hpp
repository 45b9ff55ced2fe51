#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fracsys/ml_matrix.hpp"
#include "fracsys/system.hpp"

namespace fracsys {

// S(t) sampled on a grid. Caputo: values[i] = S(t_i).
// RL: column l is stored against the weight t^{beta_l - 1}, values[i](j,l) = t^{1-beta_l} S_+(t_i)(j,l),
// so values[0] is the finite limit diag(1/Gamma(beta_l)).
struct OperatorSamples {
  Mode mode = Mode::Caputo;
  std::vector<double> grid;
  std::vector<Mat> values;
  std::vector<double> col_power;  // weight exponent per column
  std::string method;
  int truncation = -1;
  double error_estimate = 0.0;
  std::vector<double> tail;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> info;

  // S(t_i) with weights applied (t_i > 0 in RL mode)
  Mat full(std::size_t i) const;
};

struct SeriesSolveOptions {
  int fixed_k = -1;        // >= 0: exactly K + 1 levels, no adaptivity
  int k_cap = 200;
  double rel_tol = 1e-10;  // last three levels vs running sum
  double fallback_tol = 1e-6;
  double prune_tol = 1e-20;
  bool talbot_fallback = true;
};

OperatorSamples series_operator(const std::vector<double>& b, const Mat& f, Mode mode,
                                const std::vector<double>& grid,
                                const SeriesSolveOptions& opt = {});
OperatorSamples commensurate_operator(double beta, const Mat& f, Mode mode,
                                      const std::vector<double>& grid,
                                      const JordanOptions& jopt = {});
OperatorSamples triangular_operator(const std::vector<double>& b, const Mat& f, Mode mode,
                                    const std::vector<double>& grid);
OperatorSamples talbot_operator(const std::vector<double>& b, const Mat& f, Mode mode,
                                const std::vector<double>& grid);

struct RationalReduction {
  long p = 1;
  long n_total = 0;
  std::vector<long> n;
};

RationalReduction reduce_rational(const MultiOrder& b);
RationalReduction reduce_rational(const std::vector<std::pair<long, long>>& q);

struct AugmentedSystem {
  double order = 1.0;  // 1/p
  long p = 1;
  Mat matrix;
  std::vector<int> heads;  // first index of each block
  std::vector<int> lasts;  // last index of each block

  // initial vector: phi_j at heads (Caputo) or at lasts (RL)
  Vec lift(const Vec& phi, Mode mode) const;
  Vec extract(const Vec& big) const;
};

// p_override: use a multiple of the reduced denominator (0 = reduced)
AugmentedSystem build_augmented(const MultiOrder& b, const Mat& f, long p_override = 0);

struct RationalOptions {
  bool partial_fractions = false;  // residue formula instead of augmented Jordan solve
  bool talbot_fallback = true;
  JordanOptions jordan;
};

OperatorSamples rational_operator(const MultiOrder& b, const Mat& f, Mode mode,
                                  const std::vector<double>& grid,
                                  const RationalOptions& opt = {});

bool is_lower_triangular(const Mat& f);
bool is_upper_triangular(const Mat& f);

// U = S Phi + int S(t - tau) D_+^{1-B} H(tau) dtau  (Caputo)
// U = S_+ Phi + int S_+(t - tau) H(tau) dtau         (RL)
Trajectory duhamel(const SystemSpec& spec, const OperatorSamples& s);

Trajectory solve_series(const SystemSpec& spec, const std::vector<double>& grid,
                        const SeriesSolveOptions& opt = {});
Trajectory solve_commensurate(const SystemSpec& spec, const std::vector<double>& grid);
Trajectory solve_rational(const SystemSpec& spec, const std::vector<double>& grid,
                          const RationalOptions& opt = {});
Trajectory solve_triangular(const SystemSpec& spec, const std::vector<double>& grid);

// Pointwise solution operator for the methods that admit one.
class SolutionOperator {
 public:
  static SolutionOperator series(const std::vector<double>& b, const Mat& f, Mode mode,
                                 const SeriesSolveOptions& opt = {});
  static SolutionOperator commensurate(double beta, const Mat& f, Mode mode);
  static SolutionOperator rational(const MultiOrder& b, const Mat& f, Mode mode,
                                   const RationalOptions& opt = {});
  static SolutionOperator talbot(const std::vector<double>& b, const Mat& f, Mode mode);

  const std::string& method() const { return method_; }
  // S(t) (Caputo) or S_+(t) (RL, t > 0)
  Mat evaluate(double t) const;

 private:
  std::string method_;
  std::function<OperatorSamples(const std::vector<double>&)> sampler_;
};

}  // namespace fracsys
