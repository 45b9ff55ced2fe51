#pragma once

#include <string>
#include <vector>

#include "fracsys/forcing_expr.hpp"
#include "fracsys/system.hpp"

namespace fracsys {

// YAML run description:
//
//   system:
//     mode: caputo            # or rl
//     orders: ["1/2", "1/3"]  # quoted q/p stays exact; decimals are treated as irrational
//     matrix: [[-1, 0], [1, [0, -2]]]   # number or [re, im]
//     initial: [1, 0]
//     forcing: ["0", "sin(t)"]          # optional, one expression per component
//   solve:
//     method: auto            # auto|series|commensurate|rational|triangular|talbot|adams
//     t_max: 1
//     steps: 1024
//     truncation: auto        # or a fixed series level K
//     tolerance: 1e-10
//     fallback_tolerance: 1e-6
//     adams_refine: 8
//   output:
//     directory: out
//     trajectory: trajectory.csv
//     report: report.json
//     format: csv
struct RunConfig {
  Mode mode = Mode::Caputo;
  MultiOrder orders;
  Mat matrix;
  Vec initial;
  std::vector<ForcingExpr> forcing;  // empty or one per component

  std::string method = "auto";
  double t_max = 1.0;
  std::size_t steps = 1024;
  int truncation = -1;  // < 0: adaptive
  double tolerance = 1e-10;
  double fallback_tolerance = 1e-6;
  int adams_refine = 8;

  std::string out_dir = ".";
  std::string trajectory_file = "trajectory.csv";
  std::string report_file = "report.json";
  std::string format = "csv";

  SystemSpec spec() const;
  bool has_forcing() const;
};

// Throws Error(Validation) with "name:line:column: message" diagnostics.
RunConfig parse_config(const std::string& text, const std::string& name = "<config>");
RunConfig load_config(const std::string& path);

std::string dump_config(const RunConfig& c);
bool equivalent(const RunConfig& a, const RunConfig& b);

}  // namespace fracsys
